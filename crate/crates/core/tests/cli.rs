use std::process::Command;

use serde_json::Value;

fn cks(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cks"))
        .args(args)
        .env_remove("CKS_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn bell_prints_the_integers() {
    let (code, out, _) = cks(&["bell", "--order", "2", "--count", "6"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1 1 2 5 15 52\n");
}

#[test]
fn bell_of_order_three_prints_polynomials_in_e() {
    let (code, out, _) = cks(&["bell", "--order", "3", "--count", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1\ne\n2*e + e^2\n");
}

#[test]
fn duality_reports_an_equivalence() {
    let (code, out, _) = cks(&["duality", "--family", "power_exp", "--beta", "0.5", "--nmax", "30"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["subcommand"], "duality");
    assert_eq!(v["results"]["report"]["verdict"], "consistent");
    assert_eq!(v["config_digest"].as_str().unwrap().len(), 64);
    assert!(v.get("wall_time").is_none());
}

#[test]
fn failed_verdict_exits_with_two() {
    // u_2 = exp(e^r - 1) grows too fast for C_{+,1/2,1}
    let (code, out, _) = cks(&["classify", "--family", "bell", "--order", "2"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["in_c_plus_half_one"]["verdict"], "violated");
}

#[test]
fn usage_errors_exit_with_one() {
    let (code, _, err) = cks(&["legendre"]);
    assert_eq!(code, 1);
    assert_eq!(err.lines().count(), 1);
    assert_eq!(cks(&["no-such-command"]).0, 1);
    assert_eq!(cks(&["bell", "--order", "9"]).0, 1);
}

#[test]
fn legendre_csv_has_the_closed_form() {
    let (code, out, _) = cks(&["legendre", "--family", "power_exp", "--beta", "0", "--nmax", "4", "--csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,ell,argmin_r,status"));
    for (n, line) in lines.enumerate().skip(1) {
        let ell: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        let x = n as f64;
        assert!((ell.ln() - x * (1.0 - x.ln())).abs() < 1e-9);
    }
}

#[test]
fn config_file_and_seed_env() {
    let dir = std::env::temp_dir().join(format!("cks-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("w.json");
    std::fs::write(&cfg, r#"{"family":"power_exp","params":{"beta":0.25}}"#).unwrap();
    let (code, out, _) = cks(&["duality", "--config", cfg.to_str().unwrap(), "--nmax", "20"]);
    assert_eq!(code, 0);
    let a: Value = serde_json::from_str(&out).unwrap();
    let (_, out2, _) = cks(&["duality", "--family", "power_exp", "--beta", "0.25", "--nmax", "20"]);
    let b: Value = serde_json::from_str(&out2).unwrap();
    assert_eq!(a["config_digest"], b["config_digest"]);

    let seeded = Command::new(env!("CARGO_BIN_EXE_cks"))
        .args(["bell", "--json"])
        .env("CKS_SEED", "99")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&seeded.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn integrability_writes_batch_csv() {
    let dir = std::env::temp_dir().join(format!("cks-mc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("batches.csv");
    let (code, out, _) = cks(&[
        "measure", "--model", "poisson", "--dim", "4", "--samples", "20000", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["verdict"], "converged");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 11);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gaussian_counterexample_exits_with_two() {
    let (code, out, _) = cks(&["integrability", "--model", "gaussian", "--dim", "1", "--p", "0", "--samples", "100000"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["verdict"], "diverging");
}

#[test]
fn single_chaos_vector_from_json() {
    let dir = std::env::temp_dir().join(format!("cks-chaos-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("phi.json");
    std::fs::write(
        &path,
        r#"{"dim":2,"degree":3,"role":"test","coefficients":[{"degree":1,"index":[1,0],"re":1.0,"im":0.0},{"degree":2,"index":[1,1],"re":0.0,"im":0.5}]}"#,
    )
    .unwrap();
    let (code, out, err) = cks(&["chaos-bounds", "--family", "power_exp", "--beta", "0.5", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["verdict"], "consistent");
    std::fs::remove_dir_all(&dir).unwrap();
}
