use std::path::Path;
use std::process::{Command, Output};

use prft_cli::output::{read_csv, read_json, CumulantRow, QuasiRow};
use prft_cli::{library, resolve, validate};
use serde_json::Value;

fn prft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prft")).args(args).output().expect("binary runs")
}

fn bundled(name: &str) -> Value {
    serde_json::from_str(library::get(name).unwrap()).unwrap()
}

fn write_scenario(dir: &Path, v: &Value) -> String {
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_scenarios_are_listed_and_valid() {
    let o = prft(&["list-scenarios"]);
    assert!(o.status.success());
    let listed: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(listed, library::names().collect::<Vec<_>>());
    for name in library::names() {
        let issues = validate::validate(&resolve(name).unwrap());
        assert!(issues.is_empty(), "{name}: {issues:?}");
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = bundled("fig2b_low");
    v["model"]["coupling"] = Value::from(1.0);
    let o = prft(&["validate", &write_scenario(dir.path(), &v)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("coupling"), "{}", stderr(&o));
}

#[test]
fn aliasing_window_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = bundled("fig2b_low");
    v["counting"]["grid"] = Value::from(16);
    v["counting"]["window"] = Value::from(40);
    let o = prft(&["run", &write_scenario(dir.path(), &v), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("aliasing"), "{}", stderr(&o));
}

#[test]
fn photon_phase_must_match_drive() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = bundled("fig2a");
    v["photons"][0]["phase"] = Value::from(0.3);
    let o = prft(&["validate", &write_scenario(dir.path(), &v)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("drive phase"), "{}", stderr(&o));
}

#[test]
fn missing_scenario_is_an_io_error() {
    let o = prft(&["validate", "/nonexistent/scenario.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn runs_are_reproducible_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let oa = prft(&["run", "fig2b_high", "--out", a.path().to_str().unwrap(), "--threads", "1"]);
    let ob = prft(&["run", "fig2b_high", "--out", b.path().to_str().unwrap(), "--threads", "4"]);
    assert!(oa.status.success(), "{}", stderr(&oa));
    assert!(ob.status.success(), "{}", stderr(&ob));
    for file in ["cumulants.csv", "quasiprob.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }

    let rows: Vec<CumulantRow> = read_csv(&a.path().join("cumulants.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.k1.is_some() && r.oracle_k1.is_none()));
    let q: Vec<QuasiRow> = read_csv(&a.path().join("quasiprob.csv")).unwrap();
    for t in [rows[0].t, rows[1].t] {
        let total: f64 = q.iter().filter(|r| r.t == t).map(|r| r.q).sum();
        assert!((total - 1.0).abs() < 1e-8);
    }

    let manifest = read_json(&a.path().join("manifest.json")).unwrap();
    let source = bundled("fig2b_high");
    assert_eq!(manifest["scenario"]["name"], source["name"]);
    assert_eq!(manifest["scenario"]["times"], source["times"]);
    let files: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(files.contains(&"cumulants.csv") && files.contains(&"summary.json"));
}

#[test]
fn protocol_seed_override() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let rate = |dir: &tempfile::TempDir, seed: &str| {
        let o = prft(&["run", "protocol_desk", "--out", dir.path().to_str().unwrap(), "--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
        let summary = read_json(&dir.path().join("summary.json")).unwrap();
        summary["protocol"]["success_rate"].as_f64().unwrap()
    };
    let (x, y, z) = (rate(&dirs[0], "7"), rate(&dirs[1], "7"), rate(&dirs[2], "8"));
    assert_eq!(x, y);
    assert_ne!(x, z);
    assert!((x - 0.5).abs() < 0.01);
}
