use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ybx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ybx"))
        .args(args)
        .current_dir(dir)
        .env_remove("YB_SEED")
        .output()
        .expect("running ybx")
}

fn read_report(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("report.json")).expect("report.json");
    serde_json::from_str(&text).expect("valid JSON report")
}

#[test]
fn classical_check_passes_and_report_has_schema() {
    let dir = TempDir::new().unwrap();
    let out = ybx(dir.path(), &["check", "classical", "--trials", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_report(dir.path());
    assert_eq!(report["suite"], "check classical");
    assert_eq!(report["pass"], true);
    let residuals = report["residuals"].as_object().unwrap();
    for key in ["cybe", "round_trip", "chart", "symplectic_map", "sklyanin"] {
        assert!(residuals.contains_key(key), "missing residual {key}");
        assert!(report["tolerances"][key].is_number(), "missing tolerance {key}");
    }
}

#[test]
fn identical_seed_and_config_give_identical_reports() {
    let d1 = TempDir::new().unwrap();
    let d2 = TempDir::new().unwrap();
    for d in [&d1, &d2] {
        let out = ybx(d.path(), &["check", "classical", "--trials", "3", "--seed", "11"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let r1 = fs::read_to_string(d1.path().join("report.json")).unwrap();
    let r2 = fs::read_to_string(d2.path().join("report.json")).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn seed_env_var_is_the_fallback() {
    let d1 = TempDir::new().unwrap();
    let d2 = TempDir::new().unwrap();
    let evolve = ["evolve", "--sites", "4", "--steps", "2", "--z1", "1.3,0.4", "--z2", "0.8,-0.2"];
    for d in [&d1, &d2] {
        let out = Command::new(env!("CARGO_BIN_EXE_ybx"))
            .args(evolve)
            .current_dir(d.path())
            .env("YB_SEED", "23")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let s1 = fs::read_to_string(d1.path().join("state_out.json")).unwrap();
    let s2 = fs::read_to_string(d2.path().join("state_out.json")).unwrap();
    assert_eq!(s1, s2);
}

#[test]
fn quantum_check_passes_for_spin_one() {
    let dir = TempDir::new().unwrap();
    let out = ybx(dir.path(), &["check", "quantum", "--spin", "1", "--sites", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_report(dir.path())["pass"], true);
}

#[test]
fn evolve_writes_both_csv_tables() {
    let dir = TempDir::new().unwrap();
    let out = ybx(
        dir.path(),
        &["evolve", "--sites", "4", "--steps", "3", "--z1", "1.3,0.4", "--z2", "0.8,-0.2", "--seed", "5"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("evolution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,site,re_u,im_u,re_v,im_v"));
    // 4 sites over t = 0..=3.
    assert_eq!(lines.count(), 16);
    let cons = fs::read_to_string(dir.path().join("conserved.csv")).unwrap();
    let mut lines = cons.lines();
    assert_eq!(lines.next(), Some("t,lambda_index,re_t,im_t"));
    // 8 lambdas, two trace families, t = 0..=3.
    assert_eq!(lines.count(), 64);
}

#[test]
fn evolve_zero_steps_is_a_no_op() {
    let dir = TempDir::new().unwrap();
    let run = ybx(
        dir.path(),
        &["evolve", "--sites", "4", "--steps", "1", "--z1", "1.3,0.4", "--z2", "0.8,-0.2", "--seed", "9"],
    );
    assert_eq!(run.status.code(), Some(0));
    let input = fs::read_to_string(dir.path().join("state_out.json")).unwrap();
    let noop = ybx(
        dir.path(),
        &[
            "evolve", "--sites", "4", "--steps", "0", "--z1", "1.3,0.4", "--z2", "0.8,-0.2",
            "--state", "state_out.json", "--state-out", "noop.json",
        ],
    );
    assert_eq!(noop.status.code(), Some(0), "{}", String::from_utf8_lossy(&noop.stderr));
    let output = fs::read_to_string(dir.path().join("noop.json")).unwrap();
    assert_eq!(input, output);
}

#[test]
fn liouville_build_then_verify_then_action() {
    let dir = TempDir::new().unwrap();
    let build = ybx(dir.path(), &["liouville", "build", "--n1", "4", "--n2", "10", "--seed", "3"]);
    assert_eq!(build.status.code(), Some(0), "{}", String::from_utf8_lossy(&build.stderr));
    assert!(dir.path().join("tau.csv").exists());
    let verify = ybx(dir.path(), &["liouville", "verify", "--n1", "4", "--n2", "10"]);
    assert_eq!(verify.status.code(), Some(0), "{}", String::from_utf8_lossy(&verify.stderr));
    let action = ybx(dir.path(), &["action", "verify", "--field", "field.json"]);
    assert_eq!(action.status.code(), Some(0), "{}", String::from_utf8_lossy(&action.stderr));
    assert!(read_report(dir.path())["residuals"]["action_gradient"].as_f64().unwrap() < 1e-8);
}

#[test]
fn tolerance_failure_exits_2_but_still_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let build = ybx(dir.path(), &["liouville", "build", "--n1", "4", "--n2", "10", "--seed", "3"]);
    assert_eq!(build.status.code(), Some(0));
    // A perturbed field is no longer stationary.
    let path = dir.path().join("field.json");
    let mut field: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let mid = field["sigma"].as_array().unwrap().len() / 2;
    field["sigma"][mid][0] = Value::from(field["sigma"][mid][0].as_f64().unwrap() + 0.05);
    fs::write(&path, serde_json::to_string(&field).unwrap()).unwrap();
    let action = ybx(dir.path(), &["action", "verify", "--field", "field.json"]);
    assert_eq!(action.status.code(), Some(2));
    let report = read_report(dir.path());
    assert_eq!(report["pass"], false);
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    // Malformed complex flag.
    let bad_flag = ybx(dir.path(), &["evolve", "--sites", "4", "--steps", "1", "--z1", "oops", "--z2", "0.8,-0.2"]);
    assert_eq!(bad_flag.status.code(), Some(1));
    // Unknown subcommand.
    let bad_cmd = ybx(dir.path(), &["frobnicate"]);
    assert_eq!(bad_cmd.status.code(), Some(1));
    // Odd site count.
    let bad_sites = ybx(dir.path(), &["evolve", "--sites", "3", "--steps", "1", "--z1", "1.3,0.4", "--z2", "0.8,-0.2"]);
    assert_eq!(bad_sites.status.code(), Some(1));
    // Missing input file.
    let bad_file = ybx(dir.path(), &["action", "verify", "--field", "missing.json"]);
    assert_eq!(bad_file.status.code(), Some(1));
}
