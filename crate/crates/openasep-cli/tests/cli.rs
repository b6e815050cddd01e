use std::process::Command;

use openasep_cli::{run, sidecar_path, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("openasep").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn phase_hd_shock() {
    let v = json(&["phase", "--A", "3", "--C", "0.5", "--q", "0.5"]);
    assert_eq!(v["phase"], "HD");
    assert_eq!(v["region"], "shock");
    let theta = v["theta"].as_f64().unwrap();
    assert!((theta - 25.0 / 32.0).abs() < 1e-12, "{theta}");
    let s = v["budget_s"].as_f64().unwrap();
    assert!((s + (25.0f64 / 32.0).ln() / 3.0).abs() < 1e-12);
    // both parameterizations are echoed
    assert_eq!(v["params"]["boundary"]["A"], 3.0);
    assert!((v["params"]["rates"]["beta"].as_f64().unwrap() - 0.125).abs() < 1e-15);
}

#[test]
fn stationary_two_state() {
    let v = json(&["stationary", "--n", "1", "--alpha", "1", "--beta", "2", "--gamma", "0.5", "--delta", "0.25", "--q", "0"]);
    let w = v["measure"]["weights"].as_array().unwrap();
    assert!((w[1].as_f64().unwrap() - 1.25 / 3.75).abs() < 1e-14);
    assert!(v["params"]["boundary"]["A"].is_number());
}

#[test]
fn stationary_marginal_csv() {
    let (code, out, _) =
        call(&["stationary", "--n", "4", "--A", "3", "--C", "0.6", "--q", "0.5", "--marginal", "first", "--m", "2", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "word,weight");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("00,"));
}

#[test]
fn usage_errors() {
    let cases: &[&[&str]] = &[
        &["phase", "--A", "3", "--alpha", "1", "--C", "0.5"],
        &["phase", "--q", "0.5"],
        &["phase", "--A", "3"],
        &["stationary", "--A", "3", "--C", "0.5"],
        &["nonsense"],
        &["phase", "--A", "x", "--C", "1"],
        &["verify", "--suite", "no_such_check"],
        &["limit", "--A", "3", "--C", "0.5", "--kind", "ber", "--m", "2", "--rho", "2"],
    ];
    for args in cases {
        let (code, _, err) = call(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(err.starts_with("error:"), "{err}");
    }
}

#[test]
fn computation_errors() {
    // q outside [0, 1) and an n beyond the solver cap
    let (code, _, err) = call(&["phase", "--A", "3", "--C", "0.5", "--q", "1.5"]);
    assert_eq!(code, EXIT_COMPUTE, "{err}");
    let (code, _, err) = call(&["stationary", "--n", "20", "--A", "3", "--C", "0.5"]);
    assert_eq!(code, EXIT_COMPUTE);
    assert!(err.contains("cap"), "{err}");
    // λ needs HD
    let (code, _, _) = call(&["limit", "--A", "0.5", "--C", "3", "--q", "0.5", "--kind", "lambda", "--m", "2"]);
    assert_eq!(code, EXIT_COMPUTE);
}

#[test]
fn json_is_byte_identical() {
    let args: &[&[&str]] = &[
        &["phase", "--alpha", "0.7", "--beta", "0.2", "--gamma", "0.1", "--delta", "0.05", "--q", "0.3"],
        &["limit", "--A", "3", "--C", "0.6", "--q", "0.5", "--kind", "lambda", "--m", "2"],
        &["mc", "--A", "3", "--C", "0.6", "--q", "0.5", "--n", "4", "--site", "1,4", "--time", "500", "--burn-in", "50", "--seed", "9"],
        &["verify", "--suite", "gf_bound,sandwich", "--format", "json"],
    ];
    for a in args {
        let first = call(a);
        assert_eq!(first.0, EXIT_OK, "{a:?}: {}", first.2);
        assert_eq!(first.1, call(a).1, "{a:?}");
    }
}

#[test]
fn gf_both_sides() {
    let v = json(&["gf", "--A", "0.5", "--C", "3", "--q", "0.5", "--n", "6", "--t", "1.01,1.03", "--rhs"]);
    assert_eq!(v["m"], 2);
    assert!(v["rel_diff"].as_f64().unwrap() < 1e-6);
}

#[test]
fn limit_ber_defaults_to_phase_density() {
    let v = json(&["limit", "--A", "0.5", "--C", "3", "--q", "0.5", "--kind", "ber", "--m", "1"]);
    assert!((v["rho"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(v["measure"]["weights"][1], 0.25);
}

#[test]
fn mc_lines() {
    let (code, out, _) =
        call(&["mc", "--A", "3", "--C", "0.6", "--q", "0.5", "--n", "3", "--first-words", "2", "--time", "300", "--burn-in", "30", "--replicas", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[0]["label"], "first2=00");
    assert_eq!(lines[0]["seed"], 2024);
    assert_eq!(lines[4]["seed"], 2025);
    let total: f64 = lines[..4].iter().map(|l| l["mean"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn scan_csv_with_sidecar_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv = dir.path().join("scan.csv");
    std::fs::write(&cfg, "# LD point\nA = 0.5\nC=3\nq=0.5\nn-list=4,5\nm=2\n").unwrap();
    // --n-list on the command line replaces the config entry
    let (code, out, err) = call(&[
        "scan",
        "--config",
        cfg.to_str().unwrap(),
        "--n-list",
        "4,6,8",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,m,tv,theta_pow,fitted_bound");
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("8,2,"));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&csv)).unwrap()).unwrap();
    assert!((side["theta"].as_f64().unwrap() - 25.0 / 32.0).abs() < 1e-12);
    assert_eq!(side["limit_name"], "Ber_2(1/(1+C))");
    assert!(side["fitted_h"].as_f64().unwrap() > 0.0);
}

#[test]
fn bad_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "A 3\n").unwrap();
    let (code, _, err) = call(&["phase", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn jobs_flag() {
    let (code, _, _) = call(&["verify", "--suite", "phase", "--jobs", "1", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = call(&["verify", "--suite", "phase", "--jobs", "0"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_openasep");
    let ok = Command::new(bin).args(["phase", "--A", "3", "--C", "0.5", "--q", "0.5"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["phase", "--bogus"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify"));
}
