use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grunsky_core::grunsky::operator_from_json;
use tempfile::TempDir;

const PAIR: &str = r#"{
  "maps": [
    {"kind": "affine_disk", "center": [0, 0], "radius": 1},
    {"kind": "affine_disk", "center": [3, 0], "radius": 1}
  ],
  "order": 8
}"#;

const TRIPLE: &str = r#"{
  "maps": [
    {"kind": "quadratic", "center": [0, 0], "c": [0.2, 0]},
    {"kind": "affine_disk", "center": [3, 0], "radius": 1},
    {"kind": "joukowski_ellipse", "center": [-3, 0], "c": [0.2, 0.1]}
  ],
  "order": 12,
  "sweep": [2, 4, 8, 12],
  "family": {"index": 0, "phi": [[0, 0], [1, 0]], "delta": 0.002}
}"#;

fn grunsky(args: &[&str], config: Option<&Path>, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grunsky"));
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().expect("binary runs")
}

fn setup(config: &str) -> (TempDir, PathBuf, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, config).unwrap();
    let out = dir.path().join("out");
    (dir, path, out)
}

#[test]
fn zoo_list_prints_catalog() {
    let o = grunsky(&["zoo-list"], None, None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for kind in ["affine_disk", "quadratic", "joukowski_ellipse", "raw_series"] {
        assert!(text.contains(kind), "{text}");
    }
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn compute_writes_operator_files() {
    let (_dir, config, out) = setup(PAIR);
    let o = grunsky(&["compute"], Some(&config), Some(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = fs::read_to_string(out.join("operator.json")).unwrap();
    let (op, norm) = operator_from_json(&json).unwrap();
    assert_eq!((op.n(), op.order()), (2, 8));
    assert!((op.block(1, 0).matrix[(0, 0)].re + 1.0 / 9.0).abs() <= 1e-10);
    assert!(norm.unwrap() < 1.0);

    let csv = fs::read_to_string(out.join("operator.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
    assert!(csv.lines().all(|l| l.split(',').count() == 32));
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("operator norm"));
}

#[test]
fn overrides_take_precedence() {
    let (_dir, config, out) = setup(PAIR);
    let o = grunsky(&["compute", "--order", "5", "--route", "quadrature"], Some(&config), Some(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("operator.json")).unwrap()).unwrap();
    assert_eq!(v["N"], 5);
    assert_eq!(v["route"], "quadrature");
    let m00 = v["blocks"][2]["entries"][0][0][0].as_f64().unwrap();
    assert!((m00 + 1.0 / 9.0).abs() <= 1e-10);
}

#[test]
fn overlapping_disks_exit_with_validation_code() {
    let (_dir, config, out) = setup(
        r#"{"maps": [{"kind": "affine_disk", "center": [0, 0], "radius": 1},
                      {"kind": "affine_disk", "center": [1.5, 0], "radius": 1}]}"#,
    );
    let o = grunsky(&["compute"], Some(&config), Some(&out));
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("maps[0], maps[1]"), "{err}");
    assert!(!out.join("operator.json").exists());
}

#[test]
fn malformed_config_names_location() {
    let (_dir, config, out) = setup("{\"maps\": [],\n  \"order\": \"many\"}");
    let o = grunsky(&["norm"], Some(&config), Some(&out));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 2"));
}

#[test]
fn missing_config_is_a_validation_error() {
    let o = grunsky(&["compute"], None, None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn every_command_writes_its_outputs() {
    let (_dir, config, out) = setup(TRIPLE);
    for (command, file) in [
        ("norm", "norm.json"),
        ("sweep", "sweep.csv"),
        ("invariance", "invariance.json"),
        ("recover", "recovery.json"),
        ("holomorphy", "holomorphy.json"),
    ] {
        let o = grunsky(&[command], Some(&config), Some(&out));
        assert!(o.status.success(), "{command}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(file).exists(), "{command}");
    }

    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let norms: Vec<f64> = sweep.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(norms.len(), 4);
    assert!(norms.windows(2).all(|w| w[0] <= w[1]));

    let inv: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("invariance.json")).unwrap()).unwrap();
    assert!(inv["max_deviation"].as_f64().unwrap() <= 1e-8);

    let rec: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("recovery.json")).unwrap()).unwrap();
    assert!(rec["residuals"]["schwarzian"].as_f64().unwrap() <= 1e-10);
    // S(0) = −6c² with c = 0.2, unchanged by the normalization.
    assert!((rec["schwarzian_at_zero"][0][0].as_f64().unwrap() + 0.24).abs() <= 1e-10);

    let hol: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("holomorphy.json")).unwrap()).unwrap();
    let order = hol["observed_order"].as_f64().unwrap();
    assert!((order - 2.0).abs() < 0.1, "{order}");
}

#[test]
fn holomorphy_without_family_fails_on_that_field() {
    let (_dir, config, out) = setup(PAIR);
    let o = grunsky(&["holomorphy"], Some(&config), Some(&out));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("error: family"));
}
