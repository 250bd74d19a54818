//! Black-box tests of the binary: exit codes, determinism, and the bundled
//! scenario suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symot"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symot-test-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn bundled_suite_passes() {
    let scenarios = repo_root().join("scenarios");
    let out = tmp_dir("suite");
    let output = run(&[
        "suite",
        "--config",
        scenarios.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    let summary = fs::read_to_string(out.join("suite.summary.json")).unwrap();
    assert!(summary.contains("\"failed\": 0"), "{summary}");
}

#[test]
fn empty_suite_is_a_pass() {
    let config = tmp_dir("empty-config");
    let out = tmp_dir("empty-out");
    let output = run(&[
        "suite",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("0 scenarios"), "{text}");
}

#[test]
fn corrupted_input_exits_two_and_names_the_file() {
    let dir = tmp_dir("corrupt");
    fs::write(dir.join("mu.json"), "{ not json").unwrap();
    fs::write(
        dir.join("scenario.json"),
        r#"{
            "name": "broken",
            "command": "check-monotone",
            "inputs": { "field": "u.field.json" },
            "checks": ["monotone"]
        }"#,
    )
    .unwrap();
    fs::write(
        dir.join("u.field.json"),
        r#"{ "measure": "mu.json", "values": [[0.0]] }"#,
    )
    .unwrap();
    let out = tmp_dir("corrupt-out");
    let output = run(&[
        "check-monotone",
        "--config",
        dir.join("scenario.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("mu.json"), "stderr does not name the file: {err}");
}

#[test]
fn command_must_match_config() {
    let scenario = repo_root().join("scenarios/02_solve_sym_negid.json");
    let out = tmp_dir("mismatch");
    let output = run(&[
        "assign",
        "--config",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    let dir = tmp_dir("failcheck");
    fs::write(
        dir.join("mu.json"),
        r#"{ "points": [[-1.0], [1.0]], "weights": [0.5, 0.5] }"#,
    )
    .unwrap();
    fs::write(
        dir.join("u.field.json"),
        r#"{ "measure": "mu.json", "values": [[1.0], [-1.0]] }"#,
    )
    .unwrap();
    fs::write(
        dir.join("scenario.json"),
        r#"{
            "name": "decreasing_is_not_monotone",
            "command": "check-monotone",
            "inputs": { "field": "u.field.json" },
            "checks": ["monotone"]
        }"#,
    )
    .unwrap();
    let out = tmp_dir("failcheck-out");
    let output = run(&[
        "check-monotone",
        "--config",
        dir.join("scenario.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn identity_field_is_monotone() {
    let dir = tmp_dir("identity");
    fs::write(
        dir.join("mu.json"),
        r#"{ "points": [[-1.0], [0.0], [1.0]], "weights": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334] }"#,
    )
    .unwrap();
    fs::write(
        dir.join("u.field.json"),
        r#"{ "measure": "mu.json", "values": [[-1.0], [0.0], [1.0]] }"#,
    )
    .unwrap();
    fs::write(
        dir.join("scenario.json"),
        r#"{
            "name": "identity_monotone",
            "command": "check-monotone",
            "inputs": { "field": "u.field.json" },
            "checks": ["monotone", "all_four_true"]
        }"#,
    )
    .unwrap();
    let out = tmp_dir("identity-out");
    let output = run(&[
        "check-monotone",
        "--config",
        dir.join("scenario.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let scenario = repo_root().join("scenarios/02_solve_sym_negid.json");
    let out_a = tmp_dir("det-a");
    let out_b = tmp_dir("det-b");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "solve-sym",
            "--config",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    for name in ["solve_sym_negid.report.json", "solve_sym_negid.plan.csv"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
}

#[test]
fn solve_sym_example_matches_expectation() {
    let scenario = repo_root().join("scenarios/02_solve_sym_negid.json");
    let out = tmp_dir("negid");
    let output = run(&[
        "solve-sym",
        "--config",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("solve_sym_negid.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["results"]["value"], serde_json::json!(1.0));
    assert_eq!(report["results"]["perm"], serde_json::json!([1, 0]));
    assert_eq!(report["passed"], serde_json::json!(true));
}
