//! Command-line acceptance: reruns with one seed must serialize to
//! byte-identical CSV, and exit codes must distinguish config errors from
//! runtime errors.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybrid-mmwave"))
}

fn run_fig4(out: &Path) {
    let status = bin()
        .args(["fig4", "--seed", "7", "--out"])
        .arg(out)
        .status()
        .expect("binary runs");
    assert!(status.success());
}

#[test]
fn criterion_10_fig4_reruns_emit_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    run_fig4(&first);
    run_fig4(&second);
    let a = std::fs::read(first.join("curves.csv")).unwrap();
    let b = std::fs::read(second.join("curves.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "reruns with the same seed must be byte-identical");
    println!(
        "PASS criterion 10 [cli determinism] two fig4 runs, {} identical bytes",
        a.len()
    );

    // Both artifacts of a run are present.
    assert!(first.join("manifest.json").exists());
}

#[test]
fn seed_changes_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base");
    let other = dir.path().join("other");
    run_fig4(&base);
    let status = bin()
        .args(["fig4", "--seed", "8", "--trials", "50", "--out"])
        .arg(&other)
        .status()
        .unwrap();
    assert!(status.success());
    let a = std::fs::read(base.join("curves.csv")).unwrap();
    let b = std::fs::read(other.join("curves.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn config_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    // Missing file.
    let status = bin()
        .args(["run", "--config", "/nonexistent.json", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Invariant violation.
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"m": 4, "n": 10, "p": 2}"#).unwrap();
    let status = bin().args(["run", "--config"]).arg(&bad).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(1));

    // Unknown key.
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"m": 8, "n": 2, "p": 2, "zzz": 1}"#).unwrap();
    let status =
        bin().args(["run", "--config"]).arg(&unknown).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(1));

    // A fine file broken by a flag override.
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"m": 8, "n": 2, "p": 2, "trials": 4, "snr_db_range": [0.0]}"#)
        .unwrap();
    let status = bin()
        .args(["run", "--trials", "0", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{"m": 8, "n": 2, "p": 2, "j": 30, "trials": 2, "snr_db_range": [0.0]}"#,
    )
    .unwrap();
    // Output directory path collides with an existing file.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, b"occupied").unwrap();
    let status =
        bin().args(["run", "--config"]).arg(&good).arg("--out").arg(&blocker).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn successful_run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{
            "m": 16, "n": 2, "p": 2, "j": 45,
            "trials": 5, "snr_db_range": [0.0, 10.0],
            "master_seed": 9,
            "estimation": "perfect_equivalent",
            "curves": ["hybrid_zf", "analog_only"]
        }"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let csv = std::fs::read_to_string(out.join("curves.csv")).unwrap();
    assert!(csv.starts_with("curve_id,snr_db,"));
    assert_eq!(csv.lines().count(), 1 + 4);

    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 9"));
    assert!(manifest.contains("\"tool_version\""));
}
