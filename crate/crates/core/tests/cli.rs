//! End-to-end runs of the `horotube` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_horotube"));
    c.env_remove("OUTPUT_DIR");
    c
}

fn config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const ISOMETRY: &str = r#"{
  "command": "isometry",
  "params": {"n": 1, "lambda": 0.75},
  "weight": {"alpha": 1.0},
  "grid": {"extent": 16, "points": 1024},
  "input": {"builtin": {"name": "gaussian", "width": 1.0}}
}"#;

#[test]
fn isometry_run_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "iso.json", ISOMETRY);
    let out = dir.path().join("out");
    let status = bin().arg("--config").arg(&cfg).arg("--output").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let csv = fs::read_to_string(out.join("trace_isometry.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("input,a,value,reference,deviation"));
    for line in lines {
        let dev: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!(dev < 1e-5, "{line}");
    }
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = ISOMETRY.replace("\"command\"", "\"tolerance\": 1e-30, \"command\"");
    let cfg = config(dir.path(), "strict.json", &body);
    let status = bin().arg("--config").arg(&cfg).arg("--output").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown.json", r#"{"command": "frobnicate"}"#),
        ("lambda.json", r#"{"command": "delta-asymptotics", "params": {"n": 1, "lambda": 0.0}}"#),
        ("syntax.json", "{ not json"),
    ] {
        let cfg = config(dir.path(), name, body);
        let out = bin().arg("--config").arg(&cfg).arg("--output").arg(dir.path().join("o")).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        if name == "unknown.json" {
            assert!(err.contains("specfun-selftest") && err.contains("crown-probe"), "{err}");
        }
        if name == "lambda.json" {
            assert!(err.contains("Re λ > 0"), "{err}");
        }
    }
}

#[test]
fn crown_probe_rank_one_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "crown.json", r#"{"command": "crown-probe", "crown": {"n": 2, "y": [0, 1, 0, 0]}}"#);
    let out = dir.path().join("out");
    let status = bin().arg("--config").arg(&cfg).arg("--output").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let tau = report["values"]["tau_star"].as_f64().unwrap();
    assert!((tau - 1.0).abs() < 1e-6, "{tau}");
}

#[test]
fn selftest_and_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "sf.json", r#"{"command": "specfun-selftest"}"#);
    let status = bin().arg("--config").arg(&cfg).arg("--output").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let out = bin().arg("--list-commands").output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 10);
}

#[test]
fn output_dir_env_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"command": "norm-limit", "params": {"n": 1, "lambda": 0.75}, "weight": {"alpha": 1.0},
        "grid": {"extent": 16, "points": 1024}, "input": {"builtin": {"name": "random-bandlimited", "cutoff": 2.0, "seed": 3}},
        "tolerance": 0.05, "output_dir": "ignored"}"#;
    let cfg = config(dir.path(), "nl.json", body);
    let runs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("env{i}"))).collect();
    for r in &runs {
        let status = bin().env("OUTPUT_DIR", r).arg("--config").arg(&cfg).arg("--seed").arg("5").status().unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = fs::read(runs[0].join("trace_norm_limit.csv")).unwrap();
    let b = fs::read(runs[1].join("trace_norm_limit.csv")).unwrap();
    assert_eq!(a, b);
    let strip = |p: &Path| -> serde_json::Value {
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(p.join("report.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(strip(&runs[0]), strip(&runs[1]));
}
