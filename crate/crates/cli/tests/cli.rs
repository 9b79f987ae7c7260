use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn alioth(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alioth"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("ALIOTH_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn stta_reference_vehicle() {
    let dir = tempfile::tempdir().unwrap();
    let o = alioth(&["stta", "--config", scenario("p0.json").to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let raw = std::fs::read_to_string(dir.path().join("stta.json")).unwrap();
    assert!(raw.contains("\"beta_heave\": 0.0"));
    let v: Value = serde_json::from_str(&raw).unwrap();
    assert!((v["beta_psi_deg"].as_f64().unwrap() - 87.138).abs() < 1e-3);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["verified"] == Value::Bool(true)));
    assert!(v["leveling"]["omega_sq_sum"].as_f64().unwrap() > 0.0);
    assert!(stdout(&o).contains("heading"));
}

#[test]
fn stta_zero_drag_torque_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let o = alioth(&["stta", "--set", "vehicle.k_m=0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("K_M = 0"));
}

#[test]
fn unknown_override_and_missing_config_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&alioth(&["stta", "--set", "vehicle.mass=3"], dir.path())), 2);
    assert_eq!(code(&alioth(&["stta", "--config", "/nonexistent.json"], dir.path())), 2);
    assert_eq!(code(&alioth(&["frobnicate"], dir.path())), 2);
}

#[test]
fn simulate_leveling_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = scenario("leveling.json");
    let args = ["simulate", "--config", cfg.to_str().unwrap()];
    let oa = alioth(&args, a.path());
    let ob = alioth(&args, b.path());
    assert_eq!(code(&oa), 0, "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(code(&ob), 0);
    for f in ["trajectory.csv", "metrics.json", "attitude.svg", "nussbaum.svg"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert!(!x.is_empty(), "{f}");
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    let m = json(a.path().join("metrics.json"));
    assert!(m["metrics"]["max_abs_pitch"].as_f64().unwrap() < 5.0);
    assert!(m["metrics"]["max_abs_roll"].as_f64().unwrap() < 5.0);
    assert_eq!(m["metrics"]["handovers"], 1);
    assert_eq!(m["termination"]["reason"], "completed");
    let csv = std::fs::read_to_string(a.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,z,phi,theta,psi,"));
}

#[test]
fn simulate_zero_duration_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = alioth(&["simulate", "--set", "duration=0"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn simulate_divergence_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("ablation.json");
    let base = [
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "flags.nussbaum_enabled=false",
    ];
    assert_eq!(code(&alioth(&base, dir.path())), 3);
    // outputs are still written
    let m = json(dir.path().join("metrics.json"));
    assert_eq!(m["metrics"]["diverged"], true);
    let mut allowed = base.to_vec();
    allowed.push("--allow-divergence");
    assert_eq!(code(&alioth(&allowed, dir.path())), 0);
}

#[test]
fn ablation_bundled_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("ablation.json");
    let o = alioth(&["ablation", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(dir.path().join("ablation.json"));
    assert_eq!(r["enabled_diverged"], false);
    assert_eq!(r["disabled_all_diverged"], true);
    assert_eq!(r["runs"].as_array().unwrap().len(), 5);
    assert!(dir.path().join("ablation.svg").exists());
    assert!(stdout(&o).contains("without diverged"));
}

#[test]
fn ablation_without_sign_flip_keeps_both_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("ablation.json");
    let o = alioth(
        &[
            "ablation",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "2",
            "--set",
            "flags.flip_aux_sign=false",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let r = json(dir.path().join("ablation.json"));
    let run = &r["runs"][0];
    assert_eq!(run["seed"], 2);
    assert_eq!(run["enabled"]["diverged"], false);
    assert_eq!(run["disabled"]["diverged"], false);
}

#[test]
fn ablation_regression_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("ablation.json");
    let o = alioth(
        &[
            "ablation",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "1",
            "--set",
            "controller.k_zeta=0.1",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 4);
}

fn sweep_rows(dir: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(dir.join("sweep.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn sweep_tilt_minimum_at_pitch_singular_angle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("sweep_beta.json");
    let o = alioth(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0);
    let rows = sweep_rows(dir.path());
    assert_eq!(rows.len(), 5);
    let pitch: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let (best, _) = pitch
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert_eq!(rows[best][0].parse::<f64>().unwrap(), 0.0);
    assert!(pitch[best] < 1e-6);
}

#[test]
fn sweep_kzeta_three_rows_and_jobs_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = scenario("sweep_kzeta.json");
    let c = cfg.to_str().unwrap();
    assert_eq!(code(&alioth(&["sweep", "--config", c, "--jobs", "1"], a.path())), 0);
    assert_eq!(code(&alioth(&["sweep", "--config", c, "--jobs", "3"], b.path())), 0);
    assert_eq!(sweep_rows(a.path()).len(), 3);
    assert_eq!(
        std::fs::read(a.path().join("sweep.csv")).unwrap(),
        std::fs::read(b.path().join("sweep.csv")).unwrap()
    );
}

#[test]
fn sweep_empty_or_missing_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("sweep_beta.json");
    let o = alioth(
        &["sweep", "--config", cfg.to_str().unwrap(), "--set", "sweep.values=[]"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert_eq!(code(&alioth(&["sweep"], dir.path())), 2);
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = alioth(&["validate"], dir.path());
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout(&ok).matches("PASS").count(), 8);
    let bad = alioth(&["validate", "--set", "vehicle.i_xx=0"], dir.path());
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("FAIL construction"));
    let dep = alioth(&["validate", "--set", "allocation.e_z=[1,1,-1,-1]"], dir.path());
    assert_eq!(code(&dep), 1);
    assert!(stdout(&dep).contains("FAIL allocation_independence"));
}
