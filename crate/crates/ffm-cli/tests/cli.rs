//! Black-box checks of the command-line interface: exit codes, error
//! formatting, and the benchmark driver's output contract.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffm"))
}

#[test]
fn unknown_subcommand_exits_nonzero() {
    let output = bin().arg("frobnicate").output().unwrap();
    assert!(!output.status.success());
}

#[test]
fn missing_input_yields_single_line_error() {
    let output = bin()
        .args([
            "describe", "--in", "/nonexistent/stream.raw", "--method", "ffm", "--out",
            "/tmp/never.json",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error: "), "stderr: {stderr}");
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
}

#[test]
fn contract_violation_is_reported_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("s.raw");
    let status = bin()
        .args([
            "generate", "--chunks", "10", "--chunk-size", "5", "--features", "8", "--drifts",
            "1", "--drift-type", "sudden", "--seed", "1", "--out",
            raw.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    // n larger than the retained half-spectrum
    let output = bin()
        .args([
            "describe", "--in", raw.to_str().unwrap(), "--n", "100", "--method", "ffm",
            "--out", dir.path().join("m.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.starts_with("error: "), "stderr: {stderr}");
}

#[test]
fn benchmark_writes_the_documented_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let status = bin()
        .args([
            "benchmark", "--experiment", "2", "--replicas", "2", "--seed", "3", "--out-dir",
            out.to_str().unwrap(), "--chunks", "40", "--chunk-size", "16", "--features",
            "16",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    for file in ["streams.csv", "aggregate.csv", "ttests.csv", "manifest.json"] {
        assert!(out.join(file).exists(), "missing {file}");
    }
    let streams = std::fs::read_to_string(out.join("streams.csv")).unwrap();
    // header + 3 drift types x 2 replicas x 3 methods
    assert_eq!(streams.lines().count(), 1 + 18, "streams.csv:\n{streams}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["experiment"], 2);
    assert_eq!(manifest["runs"].as_array().unwrap().len(), 6);
}

#[test]
fn bad_experiment_number_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args([
            "benchmark", "--experiment", "4", "--out-dir",
            dir.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error: "));
}
