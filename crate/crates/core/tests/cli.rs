use std::path::Path;
use std::process::{Command, Output};

fn corona(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corona-pdo")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn lists_the_presets() {
    let out = corona(&["list-examples"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["stoskan", "rradial", "pescado", "cesaro", "sepavar"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(corona(&["run", "--example", "nope"]).status.code(), Some(1));
    let bad = write(dir.path(), "bad.json", r#"{"schema": 1, "task": "gohberg", "oops": true}"#);
    assert_eq!(corona(&["run", "--config", &bad]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(corona(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn fourier_selftest_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ft.json", r#"{"schema": 1, "task": "fourier-selftest"}"#);
    let out = corona(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["task"], "fourier-selftest");
    assert!(report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"schema": 1, "task": "gohberg",
            "symbol": {"type": "tensor", "gamma": "trig:2:1", "psi": "vo:sqrt"},
            "schedule": {"bands": [64, 128, 256], "oversample": 4}}"#,
    );
    let mut reports = Vec::new();
    let out_dir = dir.path().join("out");
    for _ in 0..2 {
        let out = corona(&["run", "--config", &cfg, "--seed", "11", "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join("sigma.csv").exists());
        reports.push(std::fs::read(out_dir.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn non_vanishing_oscillation_is_flagged_unreliable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sin.json",
        r#"{"schema": 1, "task": "gohberg",
            "symbol": {"type": "tensor", "gamma": "trig:2:1", "psi": "sin"},
            "schedule": {"bands": [64, 128, 256], "oversample": 4}}"#,
    );
    let out = corona(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["gohberg"]["verdict"], "UNRELIABLE", "{report}");
    assert!(!report["warnings"].as_array().unwrap().is_empty());
}
