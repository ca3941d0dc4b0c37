//! End-to-end runs of the `rbf` binary. Golden outputs live in
//! `tests/golden`; set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rbf_core::FilterParams;
use rbf_sim::{epoch_seed, ExperimentConfig, Workload};

fn rbf(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rbf"));
    cmd.args(args).env_remove("RBF_SEED");
    if let Some(seed) = env_seed {
        cmd.env("RBF_SEED", seed);
    }
    cmd.output().expect("failed to start rbf")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = rbf(args, None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_golden(name: &str, args: &[&str]) {
    let got = stdout_ok(args);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert_eq!(got, want, "output of `rbf {}` changed", args.join(" "));
}

#[test]
fn golden_model() {
    check_golden("model.csv", &["model", "--M", "1000", "--k", "5", "--sigma", "500"]);
    check_golden(
        "model_two_phase.json",
        &["model", "--M", "1000", "--k", "5", "--sigma", "250", "--phases", "two", "--format", "json"],
    );
}

#[test]
fn golden_bounds() {
    check_golden("bounds.csv", &["bounds", "--M", "1000", "--k", "7", "--N", "100", "--target", "0.01"]);
}

#[test]
fn golden_plan() {
    check_golden("plan.csv", &["plan", "--M", "1000", "--target", "0.01"]);
}

#[test]
fn golden_compare() {
    check_golden("compare.csv", &["compare", "--M", "500,1000", "--target", "0.01,0.001"]);
}

#[test]
fn golden_sweep() {
    check_golden("sweep.csv", &["sweep", "--M", "1000"]);
}

const SIMULATE: &[&str] = &[
    "simulate", "--M", "1000", "--k", "5", "--sigma", "400", "--epochs", "3", "--arrivals", "20000",
    "--universe", "1000", "--seed", "5",
];

#[test]
fn golden_simulate_is_reproducible() {
    check_golden("simulate.csv", SIMULATE);
    assert_eq!(stdout_ok(SIMULATE), stdout_ok(SIMULATE));
}

#[test]
fn json_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut args = SIMULATE.to_vec();
    args.extend(["--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(stdout_ok(&args), "");
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["epochs"][0]["seed"], epoch_seed(5, 0));
    assert_eq!(value["epochs"].as_array().unwrap().len(), 3);
    let predictions = value["predictions"].as_array().unwrap();
    assert!(predictions.iter().any(|p| p["name"] == "f_sigma_1"));
}

/// Master seed a simulate run actually used, recovered from its first row.
fn first_epoch_seed(out: &Output) -> u64 {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let row = text.lines().nth(1).unwrap();
    row.split(',').nth(1).unwrap().parse().unwrap()
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig {
        filter: FilterParams::sigma_bounded(200, 3, 100).unwrap(),
        workload: Workload::UniformUniverse { size: 300 },
        epochs: 2,
        arrivals: 500,
        seed: 40,
        confidence_level: 0.99,
        trace: None,
    };
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let cfg = path.to_str().unwrap();

    let bare = ["simulate", "--M", "200", "--k", "3", "--sigma", "100", "--epochs", "2", "--arrivals", "500"];
    assert_eq!(first_epoch_seed(&rbf(&bare, None)), epoch_seed(1, 0));
    assert_eq!(first_epoch_seed(&rbf(&bare, Some("41"))), epoch_seed(41, 0));
    assert_eq!(first_epoch_seed(&rbf(&["simulate", "--config", cfg], Some("41"))), epoch_seed(40, 0));
    assert_eq!(
        first_epoch_seed(&rbf(&["simulate", "--config", cfg, "--seed", "42"], Some("41"))),
        epoch_seed(42, 0)
    );

    // Flags override the config field by field.
    let out = rbf(&["simulate", "--config", cfg, "--epochs", "4"], None);
    let rows = String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| l.as_bytes()[0].is_ascii_digit())
        .count();
    assert_eq!(rows, 4);
    let out = rbf(&["simulate", "--config", cfg, "--sigma", "120"], None);
    assert!(String::from_utf8_lossy(&out.stdout).contains(",120\n"));
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = rbf(args, None);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn invalid_input_exits_with_2() {
    let (code, err) = exit_code(&["model", "--M", "10", "--k", "0", "--sigma", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("k must satisfy"), "{err}");
    assert_eq!(exit_code(&["model", "--M", "10", "--k", "2", "--sigma", "10"]).0, 2);
    assert_eq!(exit_code(&["model", "--bogus"]).0, 2);
    assert_eq!(exit_code(&["plan", "--M", "1000", "--target", "1.5"]).0, 2);
    assert_eq!(exit_code(&["simulate", "--p-repeat", "1.0"]).0, 2);
    assert_eq!(exit_code(&["model", "--M", "100", "--k", "2", "--sigma", "50", "--retention", "retaining", "--phases", "two"]).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"epochs\": ").unwrap();
    assert_eq!(exit_code(&["simulate", "--config", path.to_str().unwrap()]).0, 2);
    let (code, err) = exit_code(&["simulate", "--seed", "x"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn runtime_failures_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(exit_code(&["simulate", "--config", missing.to_str().unwrap()]).0, 1);
    let unwritable = dir.path().join("no/such/dir/out.csv");
    assert_eq!(exit_code(&["bounds", "--M", "100", "--k", "2", "--N", "10", "--out", unwritable.to_str().unwrap()]).0, 1);
}
