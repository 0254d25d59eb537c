use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sutherland")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_at_time_zero_writes_one_row() {
    let dir = TempDir::new().unwrap();
    let out = run(&["simulate", "--t-final", "0"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "t,q_1,q_2,p_1,p_2,energy");
    assert_eq!(lines[1].split(',').count(), 6);
}

#[test]
fn default_simulation_conserves_energy() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"lax_residual": true, "t_final": 5.0}"#);
    let out = run(&["simulate", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let s = json(&dir.path().join("summary.json"));
    assert!(s["energy_drift"].as_f64().unwrap() <= 1e-8);
    assert!(s["lax_residual"]["max_rel"].as_f64().unwrap() <= 1e-4);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let value = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn malformed_config_names_the_location() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.json", "{\n  \"n\": 2,\n  \"g\": \"one\"\n}");
    let out = run(&["simulate", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("invalid configuration") && err.contains("line 3"), "{err}");
}

#[test]
fn excluded_coupling_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"g": 0.75, "g2": 1.5}"#);
    let out = run(&["scatter", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g2 = 2g"));
}

#[test]
fn scatter_single_particle() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"n": 1, "g": 1.0, "g2": 0.7, "q0": [0.8], "p0": [-0.9]}"#);
    let out = run(&["scatter", "--config", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("scatter.json"));
    for route in ["closed_form", "fit"] {
        let res = r[route]["theorem3_residual"].as_array().unwrap();
        assert_eq!(res.len(), 1);
    }
    // n = 1: q⁺ + q⁻ = δ(2p⁻, g₂)
    let lam = r["closed_form"]["lambda"][0].as_f64().unwrap();
    let sum = r["closed_form"]["q_plus"][0].as_f64().unwrap() + r["closed_form"]["q_minus"][0].as_f64().unwrap();
    let delta = 0.5 * (1.0 + 4.0 * 0.49 / (4.0 * lam * lam)).ln();
    assert!((sum - delta).abs() < 1e-12);
    assert!(r["closed_form"]["fit_rms"].is_null());
    assert!(r["fit"]["fit_rms"].is_array());
}

#[test]
fn scatter_three_particles() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"n": 3, "g": 0.8, "g2": -1.2, "q0": [2.6, 1.5, 0.6], "p0": [0.3, -0.5, 0.9]}"#,
    );
    let out = run(&["scatter", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let r = json(&dir.path().join("scatter.json"));
    let max = |route: &str| {
        r[route]["theorem3_residual"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).fold(0.0, f64::max)
    };
    assert!(max("closed_form") <= 1e-9);
    assert!(max("fit") <= 1e-3);
    let text = fs::read_to_string(dir.path().join("scatter.json")).unwrap();
    let section = &text[..text.find("\"fit\":").unwrap()];
    let order =
        ["lambda", "q_plus", "q_minus", "p_plus", "p_minus", "z_re", "z_im", "theta", "theorem3_residual", "fit_rms"];
    let at: Vec<usize> = order.iter().map(|k| section.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn verify_default_passes_and_perturbation_fails() {
    let dir = TempDir::new().unwrap();
    let out = run(&["verify"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["passed"], Value::Bool(true));

    let bad = TempDir::new().unwrap();
    let out = run(&["verify", "--perturb-xi", "1e-3"], bad.path());
    assert_eq!(out.status.code(), Some(1));
    let r = json(&bad.path().join("verify.json"));
    assert_eq!(r["commutation"]["passed"], Value::Bool(false));
    assert!(r["commutation"]["value"].as_f64().unwrap() > r["commutation"]["bound"].as_f64().unwrap());
}

#[test]
fn verify_single_particle_is_well_formed() {
    let dir = TempDir::new().unwrap();
    let cfg =
        write_config(&dir, "c.json", r#"{"n": 1, "g": 1.0, "g2": 0.9, "q0": [0.7], "p0": [0.4], "t_final": 2.0}"#);
    let out = run(&["verify", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["pair_gaps"].as_array().unwrap().len(), 0);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = write_config(&a, "c.json", r#"{"n": 3, "q0": null, "p0": null, "t_final": 3.0}"#);
    for dir in [&a, &b] {
        assert!(run(&["simulate", "--config", &cfg, "--seed", "42"], dir.path()).status.success());
    }
    for name in ["trajectory.csv", "summary.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn dual_reports_unit_determinant() {
    let dir = TempDir::new().unwrap();
    let input = write_config(&dir, "d.json", r#"{"lambda": [2.0, 0.9], "theta": [0.3, -0.2], "g": 1.0, "g2": 0.4}"#);
    let out = run(&["dual", "--config", &input], dir.path());
    assert!(out.status.success());
    let r = json(&dir.path().join("dual.json"));
    assert!(r["det_residual"].as_f64().unwrap() < 1e-8);
    let (h, ht) = (r["hamiltonian_closed_form"].as_f64().unwrap(), r["hamiltonian_trace"].as_f64().unwrap());
    assert!((h - ht).abs() <= 1e-10 * h);
    let csv = fs::read_to_string(dir.path().join("dual_lax.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "row,col,re,im");
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn dual_rejects_unordered_lambda() {
    let dir = TempDir::new().unwrap();
    let input = write_config(&dir, "d.json", r#"{"lambda": [0.5, 0.9], "theta": [0, 0], "g": 1.0, "g2": 0.4}"#);
    assert_eq!(run(&["dual", "--config", &input], dir.path()).status.code(), Some(2));
}

#[test]
fn identities_are_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let out = run(&["identities", "--seed", "7", "--sizes", "1,3,6", "--instances", "20"], dir.path());
        assert!(out.status.success());
    }
    let ra = fs::read(a.path().join("identities.json")).unwrap();
    assert_eq!(ra, fs::read(b.path().join("identities.json")).unwrap());
    assert_eq!(json(&a.path().join("identities.json"))["passed"], Value::Bool(true));
}
