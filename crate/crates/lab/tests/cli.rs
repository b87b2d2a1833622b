//! End-to-end tests of the `paradigm-lab` binary: exit codes, output files,
//! seed overrides, the thread-count environment fallback, and the config echo
//! round-trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("paradigm-lab-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn small_config(out: &Path) -> String {
    format!(
        r#"{{
  "scenario": "limit_beta1",
  "params": {{"c1": 1.0, "c2": 0.5, "alpha": -1.0, "beta": 1.0, "p": 0.01}},
  "horizon": 5.0,
  "grid_dt": 0.5,
  "replicates": 500,
  "seed": 11,
  "output_path": {:?}
}}"#,
        out.join("out").to_str().unwrap()
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paradigm-lab"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "expected success, got {:?}\nstderr: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn run_writes_all_outputs_and_exits_zero() {
    let dir = workdir("run");
    let config = dir.join("config.json");
    std::fs::write(&config, small_config(&dir)).unwrap();
    let output = run_ok(&["run", config.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("limit_beta1: PASS"), "stdout: {stdout}");
    for file in ["report.json", "metrics.csv", "checks.csv", "samples.csv"] {
        assert!(dir.join("out").join(file).exists(), "{file} missing");
    }
    // Timings go to stderr, never into the files.
    assert!(String::from_utf8_lossy(&output.stderr).contains("timings"));
    let report = std::fs::read_to_string(dir.join("out").join("report.json")).unwrap();
    assert!(!report.contains("timing"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = workdir("invalid");
    let config = dir.join("config.json");
    std::fs::write(&config, r#"{"scenario": "lln"}"#).unwrap();
    let output = bin()
        .args(["run", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("config error"));

    let output = bin()
        .args(["validate", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));

    let missing = dir.join("nope.json");
    let output = bin()
        .args(["run", missing.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn validate_and_params_report_derived_constants() {
    let dir = workdir("params");
    let config = dir.join("config.json");
    std::fs::write(&config, small_config(&dir)).unwrap();

    let output = run_ok(&["validate", config.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&output.stdout).starts_with("ok"));

    let output = run_ok(&["params", config.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("gamma = 0.5"));
    assert!(stdout.contains("nu    = 1"));
    assert!(stdout.contains("tau   = 0"));
    assert!(stdout.contains("c0    = 1.4142135623730951"));
    // beta = 1: no OU block.
    assert!(!stdout.contains("sigma"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn seed_override_changes_samples_and_is_echoed() {
    let dir = workdir("seed");
    let config = dir.join("config.json");
    std::fs::write(&config, small_config(&dir)).unwrap();
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    run_ok(&["run", config.to_str().unwrap(), "--out", out_a.to_str().unwrap()]);
    run_ok(&[
        "run",
        config.to_str().unwrap(),
        "--seed",
        "999",
        "--out",
        out_b.to_str().unwrap(),
    ]);
    let samples_a = std::fs::read(out_a.join("samples.csv")).unwrap();
    let samples_b = std::fs::read(out_b.join("samples.csv")).unwrap();
    assert_ne!(samples_a, samples_b, "different seeds must change the samples");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_b.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 999);
    assert_eq!(report["config"]["seed"], 999);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn thread_env_var_is_accepted() {
    let dir = workdir("env");
    let config = dir.join("config.json");
    std::fs::write(&config, small_config(&dir)).unwrap();
    let output = bin()
        .args(["run", config.to_str().unwrap()])
        .env("PARADIGM_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert!(output.status.success());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn echoed_config_reparses_to_the_same_experiment() {
    use paradigm_lab::config::ExperimentConfig;
    let dir = workdir("echo");
    let config_path = dir.join("config.json");
    std::fs::write(&config_path, small_config(&dir)).unwrap();
    run_ok(&["run", config_path.to_str().unwrap()]);

    let original = ExperimentConfig::from_file(&config_path).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out").join("report.json")).unwrap())
            .unwrap();
    let echoed: ExperimentConfig = serde_json::from_value(report["config"].clone()).unwrap();
    assert_eq!(original, echoed);
    let _ = std::fs::remove_dir_all(&dir);
}
