//! End-to-end tests of the `weakgeo` binary: exit codes, output files,
//! environment handling, determinism, and the shipped example scenarios.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_weakgeo");

fn weakgeo(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    cmd.env_remove("WEAKGEO_OUT");
    if let Some(dir) = out_env {
        cmd.env("WEAKGEO_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const STRONG: &str = r#"{
  "schema_version": 1,
  "kind": "strong-shift",
  "system": { "alpha": { "bloch": [1.0, 0.3] }, "observable": { "pauli": "z" } },
  "coupling": { "lambda": 0.2 }
}"#;

#[test]
fn run_passes_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "strong.json", STRONG);
    let out_dir = dir.path().join("out");
    let output = weakgeo(
        &["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        None,
    );
    assert_eq!(output.status.code(), Some(0), "{output:?}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    // every comparison carries its tolerance and formula identifier
    for check in report["checks"].as_array().unwrap() {
        assert!(check["tolerance"].is_number());
        assert!(check["formula"].is_string());
    }
    // spec'd example value: shift = 0.2*cos(1.0)
    let shift = report["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == "pointer_shift")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((shift - 0.2 * 1.0f64.cos()).abs() < 1e-7);

    let csv = std::fs::read_to_string(out_dir.join("data.csv")).unwrap();
    assert!(csv.starts_with("x,initial_density,final_density\n"));
    assert_eq!(csv.lines().count(), 4097);
}

#[test]
fn out_dir_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "strong.json", STRONG);
    let out_dir = dir.path().join("from-env");
    let output = weakgeo(&["run", cfg.to_str().unwrap()], Some(&out_dir));
    assert_eq!(output.status.code(), Some(0));
    assert!(out_dir.join("report.json").is_file());
    assert!(out_dir.join("data.csv").is_file());
}

#[test]
fn malformed_config_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\n  \"kind\": oops\n}\n");
    let output = weakgeo(&["run", cfg.to_str().unwrap()], None);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bad.json:2:"), "stderr: {stderr}");

    let missing = dir.path().join("nope.json");
    let output = weakgeo(&["run", missing.to_str().unwrap()], None);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // epsilon coupling on a strong-shift scenario
    let cfg = write_config(
        dir.path(),
        "invalid.json",
        r#"{
  "schema_version": 1,
  "kind": "strong-shift",
  "system": { "alpha": { "bloch": [1.0, 0.3] }, "observable": { "pauli": "z" } },
  "coupling": { "epsilon": 0.001 }
}"#,
    );
    let output = weakgeo(&["run", cfg.to_str().unwrap()], None);
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn unknown_suite_exits_3() {
    let output = weakgeo(&["battery", "not-a-suite"], None);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn physics_guard_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    // post-selection orthogonal to the pre-selection
    let cfg = write_config(
        dir.path(),
        "orthogonal.json",
        r#"{
  "schema_version": 1,
  "kind": "weak-shift",
  "system": { "alpha": { "bloch": [0.0, 0.0] }, "observable": { "pauli": "x" } },
  "coupling": { "epsilon": 0.001 },
  "postselect": { "bloch": [3.141592653589793, 0.0] }
}"#,
    );
    let output = weakgeo(&["run", cfg.to_str().unwrap()], None);
    assert_eq!(output.status.code(), Some(4), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("orthogonal"), "stderr: {stderr}");
}

#[test]
fn tolerance_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let output = weakgeo(
        &[
            "battery",
            "shift-theorem",
            "--seed",
            "7",
            "--count",
            "3",
            "--tolerance-scale",
            "1e-12",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(false));
    assert_eq!(report["tolerance_scale"].as_f64().unwrap(), 1e-12);
}

#[test]
fn battery_csv_is_byte_identical_for_equal_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let output = weakgeo(
            &[
                "battery",
                "theta-omega",
                "--seed",
                "42",
                "--count",
                "50",
                "--out",
                out_dir.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(output.status.code(), Some(0), "{output:?}");
        contents.push(std::fs::read(out_dir.join("data.csv")).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn list_suites_covers_everything() {
    let output = weakgeo(&["list-suites"], None);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    for suite in weakgeo::battery::SUITES {
        assert!(stdout.contains(suite.name), "missing {}", suite.name);
    }
}

#[test]
fn shipped_example_scenarios_pass() {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut found = 0;
    for entry in std::fs::read_dir(&scenarios).expect("scenarios directory exists") {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        found += 1;
        let dir = tempfile::tempdir().unwrap();
        let output = weakgeo(
            &[
                "run",
                path.to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(
            output.status.code(),
            Some(0),
            "example {} failed:\n{}",
            path.display(),
            String::from_utf8_lossy(&output.stdout)
        );
    }
    assert!(found >= 6, "expected the shipped examples, found {found}");
}
