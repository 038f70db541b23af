use std::path::Path;
use std::process::{Command, Output};

use modadapt::report::trace_from_json;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modadapt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const P1: &str = r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0]}"#;

#[test]
fn list_problems_shows_catalog() {
    let out = cli(&["list-problems"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["P1", "P2", "P3", "P4"] {
        assert!(text.contains(id));
    }
}

#[test]
fn check_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", P1);
    assert_eq!(cli(&["check", &good]).status.code(), Some(0));

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"problem": "P1", "algorithm": "ma-tr", "u0": [0, 0], "constants": {"eta1": 0.95, "eta2": 0.9}}"#,
    );
    let out = cli(&["check", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constants.eta1"));

    let out = cli(&["check", &good, "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stopping.tolerance"));
}

#[test]
fn run_exports_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "p1.json", P1);
    let csv = dir.path().join("t.csv");
    let out = cli(&["run", &config, "--output", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("k,applied_input,reference,plant_value,grad_norm,rho,radius,accepted,cauchy_override\n"));

    let json = dir.path().join("t.json");
    let out = cli(&["run", &config, "--output", json.to_str().unwrap(), "--format", "json", "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let trace = trace_from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(trace.stopping.max_iterations, 1);
    assert_eq!(trace.iterations(), 1);
}

#[test]
fn compare_prints_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"problem": "P2", "algorithm": "basic-ma", "u0": [3]}"#);
    let b = write(dir.path(), "b.json", r#"[{"problem": "P2", "algorithm": "ma-tr", "u0": [3]}]"#);
    let summary = dir.path().join("summary.csv");
    let out = cli(&["compare", &a, &b, "--output", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("unbounded-subproblem") && text.contains("converged"));
    assert_eq!(std::fs::read_to_string(summary).unwrap().lines().count(), 3);
}

#[test]
fn runtime_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "p1.json", P1);
    let unwritable = dir.path().join("missing-dir").join("t.csv");
    let out = cli(&["run", &config, "--output", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_are_validation_errors() {
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["run"]).status.code(), Some(1));
    assert_eq!(cli(&["check", "/nonexistent/config.json"]).status.code(), Some(1));
}
