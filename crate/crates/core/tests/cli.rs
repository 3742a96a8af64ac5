mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use nsp_core::cli::{cli_main, EXIT_ABORT, EXIT_OK, EXIT_VALIDATION};
use nsp_core::config::{InitialDataSpec, RunConfig};
use nsp_core::diagnostics::DissipationLedger;
use nsp_core::io::load_records;
use nsp_core::sweep::{BaseConfig, SweepPlan, SweepStage};

use common::{config_with, seeded_config};

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn nsp(args: &[&str]) -> i32 {
    cli_main(std::iter::once("nsp").chain(args.iter().copied()))
}

fn binary(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nsp")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn uniform_config() -> RunConfig {
    config_with(1, 16, 5, InitialDataSpec::uniform(1.0), 0.25)
}

#[test]
fn run_on_equilibrium_writes_a_static_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_json(tmp.path(), "config.json", &uniform_config());
    let out = tmp.path().join("run");
    assert_eq!(nsp(&["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]), EXIT_OK);
    let records = load_records(&out.join("diagnostics.csv")).unwrap();
    assert!(records.len() > 1);
    let first = &records[0];
    for r in &records {
        assert_eq!(r.kinetic, 0.0);
        assert_eq!(r.total, first.total);
        assert_eq!(r.ledger().values(), DissipationLedger::default().values());
        assert_eq!((r.min_rho, r.max_rho), (1.0, 1.0));
    }
    for name in ["config.json", "run_header.json", "summary.json"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    assert_eq!(nsp(&["report", "--dir", out.to_str().unwrap()]), EXIT_OK);
    assert_eq!(nsp(&["report", "--dir", out.to_str().unwrap(), "--format", "csv"]), EXIT_OK);
}

#[test]
fn stability_violation_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = seeded_config(1, 16, 5, 0, 0.5);
    config.dt *= 10.0;
    let cfg = write_json(tmp.path(), "config.json", &config);
    assert_eq!(nsp(&["run", "--config", cfg.to_str().unwrap()]), EXIT_VALIDATION);
}

#[test]
fn picard_failure_is_a_runtime_abort() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = seeded_config(2, 16, 13, 4, 0.5);
    // stiff regularization: the advective stability rule does not bound the capillarity term
    config.params = common::rich_params();
    config.params.lambda_sign = 1;
    config.pressure = common::perturbed_law();
    config.dt = common::stable_dt(&config);
    let cfg = write_json(tmp.path(), "config.json", &config);
    let out = tmp.path().join("run");
    assert_eq!(nsp(&["run", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]), EXIT_ABORT);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["completed"], false);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(nsp(&["run", "--no-such-flag"]), EXIT_VALIDATION);
    assert_eq!(nsp(&["frobnicate"]), EXIT_VALIDATION);
    assert_eq!(nsp(&["--help"]), EXIT_OK);
    assert_eq!(nsp(&["run", "--config", "/nonexistent/config.json"]), EXIT_VALIDATION);
    assert_eq!(binary(&["--help"]).0, EXIT_OK);
    assert_eq!(binary(&["run", "--bogus"]).0, EXIT_VALIDATION);
}

#[test]
fn pressure_certification_failure_is_data() {
    let fail = ["certify-pressure", "--gamma", "1.4", "--b", "0.3", "--amplitude", "0.6", "--frequency", "2"];
    assert_eq!(nsp(&fail), EXIT_OK);
    let (code, stdout) = binary(&fail);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("verdict: FAIL"), "{stdout}");
    let (code, stdout) = binary(&["certify-pressure", "--gamma", "1.4", "--b", "0.3", "--amplitude", "0.3"]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("verdict: PASS"), "{stdout}");
}

#[test]
fn identity_suite_passes_on_random_fields() {
    let (code, stdout) = binary(&["check-identities", "--dim", "2", "--points", "16", "--count", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("verdict: PASS"), "{stdout}");
}

#[test]
fn sweep_writes_levels_and_rejects_bad_plans() {
    let tmp = tempfile::tempdir().unwrap();
    let base = write_json(tmp.path(), "base.json", &seeded_config(1, 16, 5, 1, 0.25));
    let plan = SweepPlan {
        stage: SweepStage::Eta,
        values: vec![1e-3, 5e-4],
        base_config: BaseConfig::Path(PathBuf::from(base.file_name().unwrap())),
    };
    let plan_path = write_json(tmp.path(), "plan.json", &plan);
    let out = tmp.path().join("sweep");
    assert_eq!(nsp(&["sweep", "--plan", plan_path.to_str().unwrap(), "--output", out.to_str().unwrap()]), EXIT_OK);
    assert!(out.join("sweep_report.json").is_file());
    assert!(out.join("level_1").join("diagnostics.csv").is_file());

    let bad = SweepPlan { values: vec![5e-4, 1e-3], ..plan };
    let bad_path = write_json(tmp.path(), "bad.json", &bad);
    assert_eq!(nsp(&["sweep", "--plan", bad_path.to_str().unwrap()]), EXIT_VALIDATION);
}
