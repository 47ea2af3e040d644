//! The checked-in fuzz corpus seeds are valid inputs.

use std::path::PathBuf;

use cks_core::chaos::ChaosVector;
use cks_core::weights::{LogTable, WeightConfig};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn weight_config_seeds_build() {
    for (p, text) in seeds("weight_config") {
        let cfg = WeightConfig::from_json_str(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        cfg.build().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn log_table_seeds_parse() {
    for (p, text) in seeds("log_table") {
        LogTable::parse_text(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn chaos_vector_seeds_parse() {
    for (p, text) in seeds("chaos_vector") {
        ChaosVector::from_json_str(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
