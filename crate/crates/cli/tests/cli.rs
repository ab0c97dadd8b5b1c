use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use wiggle_core::heterostructure::{build_profile, ProfileSpec};
use wiggle_core::io::read_numeric_csv;
use wiggle_core::MaterialConstants;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn wiggle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiggle"))
        .args(args)
        .current_dir(repo())
        .output()
        .unwrap()
}

fn ok(args: &[&str]) {
    let out = wiggle(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn rows(p: &Path) -> Vec<Vec<f64>> {
    read_numeric_csv(p).unwrap().1
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn profile_rows_match_grid_and_rerun_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["profile", "--config", "configs/profile.toml", "--out", s(&a)]);
    ok(&["profile", "--config", "configs/profile.toml", "--out", s(&b)]);

    let spec: ProfileSpec = serde_json::from_value(json(&a.join("manifest.json"))["config"]["profile"].clone()).unwrap();
    let n = build_profile(&spec, &MaterialConstants::default()).unwrap().len();
    for f in ["profile.csv", "potential.csv", "envelope_state0.csv", "envelope_state1.csv"] {
        assert_eq!(rows(&a.join(f)).len(), n, "{f}");
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let levels = json(&a.join("levels.json"));
    assert_eq!(levels.as_array().unwrap().len(), 2);
}

#[test]
fn invalid_amplitude_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[profile]\namplitude = 1.5\n");
    let out = wiggle(&["profile", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("amplitude"), "{err}");
    assert!(!dir.path().join("o/manifest.json").exists());
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[profile]\namplitud = 0.1\n");
    let out = wiggle(&["profile", "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("amplitud"));
}

#[test]
fn scan_writes_one_curve_per_concentration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "scan.toml",
        "concentrations = [0.02, 0.04, 0.06, 0.08]\nq_min = 17.0\nq_max = 21.0\npoints = 500\n",
    );
    let out = dir.path().join("o");
    ok(&["scan-q", "--config", s(&cfg), "--out", s(&out)]);
    let peaks = json(&out.join("peaks.json"));
    assert_eq!(peaks.as_array().unwrap().len(), 4);
    for tag in ["0p0200", "0p0400", "0p0600", "0p0800"] {
        let curve = rows(&out.join(format!("scan_{tag}.csv")));
        assert_eq!(curve.len(), 500);
        // annotated global maximum is the curve's argmax
        let best = curve.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
        let meta = json(&out.join(format!("scan_{tag}.json")));
        assert_eq!(meta["global_max"]["q_inv_nm"].as_f64().unwrap(), best[0]);
    }
    assert_eq!(rows(&out.join("scan_combined.csv")).len(), 500);
}

#[test]
fn ensemble_does_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ens.toml",
        "concentrations = [0.05]\nconcentration_kind = \"average\"\n[ensemble]\nn_samples = 40\n\
         [ensemble.profile]\nwavelength = 1.8\ninterface_shape = \"linear_grade\"\n",
    );
    let mut outputs = Vec::new();
    for w in ["1", "8"] {
        let out = dir.path().join(w);
        ok(&["ensemble", "--config", s(&cfg), "--workers", w, "--out", s(&out)]);
        assert_eq!(rows(&out.join("ensemble_0p1000.csv")).len(), 40);
        outputs.push(std::fs::read(out.join("ensemble_0p1000.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn two_component_without_table_is_actionable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", "points = 10\n");
    let out = wiggle(&["scan-q", "--config", s(&cfg), "--mode", "two-component", "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing_table") && err.contains("--table"), "{err}");
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", "concentrations = [0.1]\nq_min = 3.0\nq_max = 5.0\npoints = 40\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["scan-q", "--config", s(&cfg), "--out", s(&a)]);
    ok(&["scan-q", "--config", s(&a.join("manifest.json")), "--out", s(&b)]);
    for f in ["scan_0p1000.csv", "scan_0p1000.json", "peaks.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    // a manifest from another command is refused
    let out = wiggle(&["profile", "--config", s(&a.join("manifest.json")), "--out", s(&dir.path().join("c"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lever_arm_from_bundled_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    ok(&["fit-leverarm", "--config", "configs/fit_leverarm.toml", "--out", s(&out)]);
    let truth = json(&repo().join("data/traces/truth.json"));
    let fit = json(&out.join("lever_arm.json"));
    let alpha = fit["alpha"].as_f64().unwrap() / truth["alpha_eV_per_V"].as_f64().unwrap();
    let t_e0 = fit["t_e0"].as_f64().unwrap() / truth["T_e0_K"].as_f64().unwrap();
    assert!((alpha - 1.0).abs() < 0.01, "{alpha}");
    assert!((t_e0 - 1.0).abs() < 0.05, "{t_e0}");
    assert_eq!(rows(&out.join("lever_arm_points.csv")).len(), 19);
    assert_eq!(rows(&out.join("energies.csv")).len(), 1);
}
