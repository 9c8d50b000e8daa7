use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use affine_body::checks::BracketReport;
use affine_body::io::{trajectory_from_csv, SpectrumReport};
use affine_body_cli::{run, RunConfig, RunOptions};
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_affine-body");

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn invoke(command: &str, config: &Value, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join(format!("{command}.config.json"));
    std::fs::write(&path, config.to_string()).unwrap();
    Command::new(BIN)
        .arg(command)
        .arg("--config")
        .arg(&path)
        .arg("--output-dir")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_reports_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"command": "classify", "initial": {"m": 1.0, "n": 2.0}, "output": {"path": "classify.json"}});
    let o = invoke("classify", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("verdict=Bounded"));

    let text = std::fs::read_to_string(dir.path().join("classify.json")).unwrap();
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/classify.json")).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), serde_json::from_str::<Value>(&golden).unwrap());
    // V_eff' = 0 where th²(x/2) = |m|/|n|
    let x_min = serde_json::from_str::<Value>(&text).unwrap()["x_min"].as_f64().unwrap();
    assert!((x_min - 2.0 * 0.5f64.sqrt().atanh()).abs() < 1e-12);
}

#[test]
fn classify_unbounded_and_quiet() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"command": "classify", "initial": {"m": 2.0, "n": 1.0}});
    let o = invoke("classify", &cfg, dir.path(), &[]);
    assert!(stdout(&o).contains("verdict=Unbounded"));
    let q = invoke("classify", &cfg, dir.path(), &["--quiet"]);
    assert_eq!(q.status.code(), Some(0));
    assert!(stdout(&q).is_empty());
}

#[test]
fn simulate_zero_state_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "command": "simulate",
        "model": {"kind": "AffAff", "A": 1.0, "B": 0.5},
        "initial": {"q": [0.0, 0.0, 0.0], "p": [0.0, 0.0, 0.0],
                    "M": [[0, 0, 0], [0, 0, 0], [0, 0, 0]], "N": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]},
        "numerics": {"t_end": 1.0, "integrator": {"method": "Rk4", "step": 0.01}},
        "output": {"path": "traj.csv", "format": "csv"}
    });
    let o = invoke("simulate", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let line = stdout(&o);
    assert!(line.contains("energy_drift=0.0000000000000000e0"), "{line}");
    let table = trajectory_from_csv(&std::fs::read_to_string(dir.path().join("traj.csv")).unwrap()).unwrap();
    assert_eq!(table.times.len(), 101);
    assert!(table.states.iter().all(|s| s.to_flat().iter().all(|v| *v == 0.0)));
}

#[test]
fn spectrum_box_matches_particle_in_a_box() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value =
        serde_json::from_str(&std::fs::read_to_string(repo_root().join("configs/spectrum_box.json")).unwrap()).unwrap();
    cfg["output"] = json!({"path": "spectrum.json"});
    let o = invoke("spectrum", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let report = SpectrumReport::from_json(&std::fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(report.eigenvalues.len(), 5);
    // E_k = ħ²π²k² / (2n(A + nB) L²), n = 3, A = 1, B = 0.5, L = 1.5
    for (k, e) in report.eigenvalues.iter().enumerate() {
        let kk = (k + 1) as f64;
        let exact = (std::f64::consts::PI * kk / 1.5).powi(2) / (2.0 * 3.0 * 2.5);
        assert!((e - exact).abs() / exact < 1e-2, "{e} vs {exact}");
    }
    let again: SpectrumReport = serde_json::from_str(&report.to_json().unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn check_brackets_is_reproducible_and_seedable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"command": "check-brackets", "numerics": {"trials": 1}, "seed": 5, "output": {"path": "b.json"}});
    let read = |d: &Path| -> BracketReport { serde_json::from_str(&std::fs::read_to_string(d.join("b.json")).unwrap()).unwrap() };
    let o = invoke("check-brackets", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let first = read(dir.path());
    assert!(first.linear < 1e-12);
    assert_eq!(first.rho_tau, 0.0);
    invoke("check-brackets", &cfg, dir.path(), &[]);
    assert_eq!(read(dir.path()), first);
    invoke("check-brackets", &cfg, dir.path(), &["--seed", "9"]);
    assert_eq!(read(dir.path()).seed, 9);
}

#[test]
fn geodesic_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg: Value =
        serde_json::from_str(&std::fs::read_to_string(repo_root().join("configs/geodesic_n3.json")).unwrap()).unwrap();
    let o = invoke("geodesic", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("passed=true"));
    let art: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("geodesic.json")).unwrap()).unwrap();
    assert!(art["max_error"].as_f64().unwrap() < 1e-6);

    let random = json!({"command": "geodesic", "model": {"kind": "AffAff", "A": 1.0, "B": 0.5}, "initial": {"n": 3}, "seed": 4});
    let r = invoke("geodesic", &random, dir.path(), &[]);
    assert_eq!(r.status.code(), Some(0), "{r:?}");
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("broken.json");
    std::fs::write(&bad_json, "{ not json").unwrap();
    let o = Command::new(BIN).args(["classify", "--config"]).arg(&bad_json).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let unknown = json!({"command": "classify", "initial": {"m": 1.0, "n": 2.0}, "extra": true});
    assert_eq!(invoke("classify", &unknown, dir.path(), &[]).status.code(), Some(2));
    let nested = json!({"command": "classify", "initial": {"m": 1.0, "n": 2.0, "k": 1}});
    assert_eq!(invoke("classify", &nested, dir.path(), &[]).status.code(), Some(2));
    let mismatch = json!({"command": "classify", "initial": {"m": 1.0, "n": 2.0}});
    assert_eq!(invoke("simulate", &mismatch, dir.path(), &[]).status.code(), Some(2));
    let missing = Command::new(BIN).args(["classify", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let domain = json!({"command": "geodesic", "model": {"kind": "MetrAff", "A": 1.0, "I": 1.0, "B": 0.5}, "initial": {"n": 3}});
    assert_eq!(invoke("geodesic", &domain, dir.path(), &[]).status.code(), Some(3));
    let coarse = json!({"command": "spectrum", "model": {"kind": "AffAff", "A": 1.0, "B": 0.5},
                        "numerics": {"n": 2, "grid": [{"q_min": -1.0, "q_max": 1.0, "points": 8}]}});
    assert_eq!(invoke("spectrum", &coarse, dir.path(), &[]).status.code(), Some(3));

    let numeric = json!({
        "command": "simulate",
        "model": {"kind": "AffAff", "A": 1.0, "B": 0.2},
        "initial": {"q": [0.8, 0.1, -0.7], "p": [0.1, -0.05, 0.02],
                    "M": [[0, 0.3, -0.2], [-0.3, 0, 0.25], [0.2, -0.25, 0]],
                    "N": [[0, 0.9, 0.6], [-0.9, 0, -0.8], [-0.6, 0.8, 0]]},
        "numerics": {"t_end": 5.0, "integrator": {"method": "Adaptive", "rtol": 1e-14, "atol": 1e-16,
                     "initial_step": 0.5, "min_step": 0.5, "max_step": 0.5}}
    });
    assert_eq!(invoke("simulate", &numeric, dir.path(), &[]).status.code(), Some(4));
}

#[test]
fn shipped_configs_parse_and_run() {
    for name in ["planar_classify", "geodesic_n3", "spectrum_box"] {
        let cfg = RunConfig::load(&repo_root().join(format!("configs/{name}.json"))).unwrap();
        let outcome = run(&cfg, &RunOptions { output_dir: Some(tempfile::tempdir().unwrap().keep()), seed: None }).unwrap();
        assert!(outcome.passed, "{name}: {}", outcome.summary);
        for artifact in &outcome.artifacts {
            if artifact.extension().is_some_and(|e| e == "json") {
                let text = std::fs::read_to_string(artifact).unwrap();
                serde_json::from_str::<Value>(&text).unwrap();
            }
        }
    }
}

#[test]
fn config_round_trip() {
    let cfg = RunConfig::load(&repo_root().join("configs/spectrum_box.json")).unwrap();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
}
