use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperctl"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap()
}

#[test]
fn run_succeeds_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let st = code(bin().args(["--quiet", "run", "--config"]).arg(config("evolve_jumps.toml")).arg("--out").arg(&out));
    assert_eq!(st, 0);
    for f in ["manifest.json", "interactions.csv", "functionals.csv", "snapshots/snapshot_000.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "schema = \"hyperctl.scenario/1\"\nexperiment = \"explode\"\n[model]\nkind = \"gas\"\n").unwrap();
    let out = dir.path().join("out");
    assert_eq!(code(bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out)), 2);
    assert!(!out.exists());
}

#[test]
fn range_override_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let st = code(
        bin()
            .args(["run", "--epsilon", "-1", "--config"])
            .arg(config("evolve_jumps.toml"))
            .arg("--out")
            .arg(&out),
    );
    assert_eq!(st, 2);
    assert!(!out.exists());
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(bin().args(["validate", "--config"]).arg(config("stabilize_gas.toml"))), 0);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.toml");
    std::fs::write(&cfg, "schema = \"hyperctl.scenario/1\"\nexperiment = \"evolve\"\n[model]\nkind = \"gas\"\ngamma = 3.5\n[initial]\nkind = \"constant\"\nstate = [1.0, 0.0]\n").unwrap();
    let o = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 < gamma < 3"));
}

#[test]
fn riemann_prints_table_and_json() {
    let o = bin().args(["riemann", "--config"]).arg(config("riemann_gas.toml")).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("family"));
    assert!(text.contains("rarefaction") && text.contains("shock"));

    let o = bin().args(["riemann", "--json", "--config"]).arg(config("riemann_gas.toml")).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["waves"].as_array().unwrap().len(), 2);
}

#[test]
fn curves_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().args(["curves", "--config"]).arg(config("riemann_gas.toml")).arg("--out").arg(dir.path())), 0);
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("sigma,u1,u2,speed,kind"));
    assert_eq!(csv.lines().count(), 42);
}

#[test]
fn plots_after_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce");
    assert_eq!(code(bin().args(["--quiet", "run", "--config"]).arg(config("counterexample_gas.toml")).arg("--out").arg(&out)), 0);
    assert_eq!(code(bin().args(["--quiet", "plots", "--out"]).arg(&out)), 0);
    for f in ["kappa_1.dat", "kappa_2.dat", "census_gap.dat"] {
        assert!(out.join("plots").join(f).exists(), "{f}");
    }
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("far.toml");
    std::fs::write(
        &cfg,
        "schema = \"hyperctl.scenario/1\"\nexperiment = \"riemann\"\n[model]\nkind = \"gas\"\n[riemann]\nleft = [1.0, 0.0]\nright = [40.0, 30.0]\n",
    )
    .unwrap();
    let st = code(bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")));
    assert_eq!(st, 3);
}
