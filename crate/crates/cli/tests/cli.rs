use critsob::scenario::parse_csv;
use std::fs;
use std::process::{Command, Output};

fn critsob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critsob")).args(args).output().unwrap()
}

#[test]
fn repeated_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2).map(|k| dir.path().join(format!("run{k}.csv")).display().to_string()).collect();
    for p in &paths {
        let out = critsob(&["scenario", "thm2_i", "--n-dim", "5", "--order", "2", "--levels", "40,80", "--seed", "4", "--out", p]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "scenario = \"proposition_signs\"\nn_dim = 5\norder = 2\nphi_norm = 0.5\nlevels = [40]\n").unwrap();
    let cfg = cfg.display().to_string();

    let out = critsob(&["scenario", "--config", &cfg]);
    let rows = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].phi_norm, 0.5);
    assert!(rows[0].lambda > 0.0);

    let out = critsob(&["scenario", "--config", &cfg, "--phi-norm", "1.5", "--nodes", "60"]);
    let rows = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!((rows[0].phi_norm, rows[0].nodes), (1.5, 60));
    assert!(rows[0].lambda < 0.0);
}

#[test]
fn json_report_carries_verdict() {
    let out = critsob(&["scenario", "norm_one", "--n-dim", "3", "--order", "1", "--nodes", "40", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_emits_one_header() {
    let out = critsob(&[
        "sweep", "proposition_signs", "--n-dim", "3", "--order", "1", "--nodes", "40", "--axis", "norm_phi", "--values",
        "0.5,1.5",
    ]);
    assert!(out.status.success());
    let rows = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].lambda > 0.0 && rows[1].lambda < 0.0);
}

#[test]
fn invalid_input_is_reported() {
    let out = critsob(&["scenario", "thm2_i", "--n-dim", "4", "--order", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must exceed"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "scenario = \"thm2_i\"\nn_dim = 5\norder = 2\ncolour = 1\n").unwrap();
    let out = critsob(&["scenario", "--config", &cfg.display().to_string()]);
    assert_eq!(out.status.code(), Some(3));

    assert!(!critsob(&["scenario", "thm9", "--n-dim", "5", "--order", "2"]).status.success());
}

#[test]
fn bare_solve_reports_both_families() {
    let out = critsob(&["solve", "--n-dim", "5", "--order", "2", "--nodes", "40"]);
    assert!(out.status.success());
    let rows = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows[0].scenario, "solve");
    assert!(rows[0].value_dirichlet > rows[0].value_navier);
}
