fn main() {
    std::process::exit(cks_core::cli::run(std::env::args_os()));
}
