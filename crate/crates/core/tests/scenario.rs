use std::path::PathBuf;

use hyperctl::scenario::{execute, run_scenario, validate_config, Scenario};
use hyperctl::Error;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn manifest(dir: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn constant_evolve_has_zero_variation_everywhere() {
    let sc = Scenario::load(&config("evolve_constant.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&sc, dir.path()).unwrap();
    assert!(summary.files.contains(&"manifest.json".to_string()));
    let m = manifest(dir.path());
    assert_eq!(m["schema"], "hyperctl.manifest/1");
    assert_eq!(m["status"], "ok");
    for s in m["metrics"]["samples"].as_array().unwrap() {
        assert_eq!(s["tv"].as_f64().unwrap(), 0.0);
        assert_eq!(s["fronts"].as_u64().unwrap(), 0);
    }
    for f in m["files"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists());
    }
}

#[test]
fn manifest_materializes_defaults() {
    let sc = Scenario::load(&config("steer_gas.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_scenario(&sc, dir.path()).unwrap();
    let m = manifest(dir.path());
    let cfg = &m["config"];
    assert_eq!(cfg["tracking"]["epsilon"].as_f64(), Some(0.01));
    assert_eq!(cfg["control"]["per_axis"].as_u64(), Some(21));
    assert_eq!(cfg["model"]["gamma"].as_f64(), Some(2.0));
    assert_eq!(m["strength_parametrization"], "riemann-coordinate jump");
}

#[test]
fn stabilize_deltas_decrease_strictly() {
    let sc = Scenario::load(&config("stabilize_gas.toml")).unwrap();
    let out = execute(&sc).unwrap();
    assert!(out.violation.is_none());
    let d: Vec<f64> = out.metrics["deltas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(d.len() >= 2);
    assert!(d.windows(2).all(|w| w[1] < w[0]));
    let csv = &out.files["contraction.csv"];
    assert!(csv.starts_with("k,t,sup_dist,tv,ratio\n"));
    assert_eq!(csv.lines().count(), d.len() + 1);
}

#[test]
fn linear_control_hits_target() {
    let sc = Scenario::load(&config("linear_control.toml")).unwrap();
    let out = execute(&sc).unwrap();
    assert!(out.violation.is_none());
    assert!(out.metrics["terminal_max_error"].as_f64().unwrap() <= 1e-12);
    assert_eq!(out.metrics["terminal_breaks_match"], true);
}

#[test]
fn steer_ends_constant() {
    let sc = Scenario::load(&config("steer_gas.toml")).unwrap();
    let out = execute(&sc).unwrap();
    assert_eq!(out.metrics["final_fronts"].as_u64(), Some(0));
    assert!(out.metrics["final_sup_distance"].as_f64().unwrap() < 1e-8);
    assert_eq!(out.metrics["hops"].as_u64(), Some(4));
}

#[test]
fn unknown_experiment_is_a_config_error() {
    let text = "schema = \"hyperctl.scenario/1\"\nexperiment = \"explode\"\n[model]\nkind = \"gas\"\n";
    let err = Scenario::from_toml(text).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn unknown_keys_are_rejected() {
    let text = "schema = \"hyperctl.scenario/1\"\nexperiment = \"evolve\"\ncolour = 3\n[model]\nkind = \"gas\"\n";
    assert!(Scenario::from_toml(text).is_err());
    let text = "schema = \"hyperctl.scenario/1\"\nexperiment = \"evolve\"\n[model]\nkind = \"gas\"\n[tracking]\nepsilonn = 0.1\n";
    assert!(Scenario::from_toml(text).is_err());
}

#[test]
fn validate_reports_gamma_range() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.toml");
    let text = std::fs::read_to_string(config("counterexample_gas.toml"))
        .unwrap()
        .replace("gamma = 2.0", "gamma = 3.5");
    std::fs::write(&p, text).unwrap();
    let d = validate_config(&p).unwrap();
    assert_eq!(d.len(), 1);
    assert!(d[0].contains("1 < gamma < 3"), "{d:?}");
}

#[test]
fn validate_reports_negative_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.toml");
    let text = std::fs::read_to_string(config("evolve_jumps.toml"))
        .unwrap()
        .replace("epsilon = 0.005", "epsilon = -0.005");
    std::fs::write(&p, text).unwrap();
    let d = validate_config(&p).unwrap();
    assert!(d.iter().any(|s| s.contains("tracking.epsilon")), "{d:?}");
}

#[test]
fn shipped_configs_validate_clean() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "toml") {
            assert_eq!(validate_config(&p).unwrap(), Vec::<String>::new(), "{}", p.display());
            n += 1;
        }
    }
    assert!(n >= 6);
}

#[test]
fn validate_of_missing_file_is_an_error() {
    assert!(validate_config(&config("no_such_file.toml")).is_err());
}

#[test]
fn identical_runs_write_identical_bytes() {
    let sc = Scenario::load(&config("evolve_jumps.toml")).unwrap();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s1 = run_scenario(&sc, d1.path()).unwrap();
    let s2 = run_scenario(&sc, d2.path()).unwrap();
    assert_eq!(s1.files, s2.files);
    for f in &s1.files {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}
