//! Runs the command-line binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use surface_poisson::persistence::{Envelope, PayloadKind};

const SEED_ENV: &str = "POISSON_SEED";

fn run(dir: &Path, args: &[&str], config: &Value, env_seed: Option<&str>) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config.to_string()).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_surface-poisson"));
    cmd.args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove(SEED_ENV);
    if let Some(s) = env_seed {
        cmd.env(SEED_ENV, s);
    }
    cmd.output().unwrap()
}

fn echoed_seed(dir: &Path, file: &str) -> u64 {
    let env = Envelope::load(&dir.join("out").join(file)).unwrap();
    env.config["seed"].as_u64().unwrap()
}

#[test]
fn sample_writes_a_loadable_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sample"], &json!({"group": "U2", "genus": 2, "samples": 3}), None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let env = Envelope::load(&dir.path().join("out/samples.json")).unwrap();
    assert_eq!(env.kind, PayloadKind::Representations);
    assert_eq!(env.payload.as_array().unwrap().len(), 3);
}

#[test]
fn seed_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"group": "SU2", "genus": 2});
    let out = run(dir.path(), &["sample", "--seed", "7"], &cfg, Some("5"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(echoed_seed(dir.path(), "samples.json"), 7);
    let out = run(dir.path(), &["sample"], &cfg, Some("5"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(echoed_seed(dir.path(), "samples.json"), 5);
}

#[test]
fn validation_errors_exit_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (json!({"group": "SU2", "genus": 0}), "genus"),
        (json!({"group": "SP4", "genus": 2}), "group"),
        (json!({"group": "SO3", "genus": 2, "central": "-I"}), "central"),
        (json!({"group": "U2", "genus": 2, "form": {"type": "diag", "entries": [1.0]}}), "form"),
        (json!({"group": "SU2", "genus": 2, "functions": ["tr(x1"]}), "functions[0]"),
        (json!({"group": "SU2", "genus": 2, "colour": 3}), "colour"),
    ];
    for (cfg, field) in cases {
        let out = run(dir.path(), &["bracket"], &cfg, None);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(1), "{cfg}: {stderr}");
        assert!(stderr.contains(field), "{cfg}: {stderr}");
    }
}

#[test]
fn numerical_guard_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "group": "SU2",
        "genus": 2,
        "functions": ["5*tr(x1*y1)^3 + tr(x2*y1)"],
        "flow": {"t_end": 20.0, "dt": 0.9}
    });
    let out = run(dir.path(), &["flow"], &cfg, None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flow aborted"));
    let csv = std::fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert!(csv.starts_with("time,f_value,relator_residual,orbit_guard\n"));
}

#[test]
fn every_command_runs() {
    let cfg = json!({
        "group": "SU2",
        "genus": 2,
        "functions": ["tr(x1)", "tr(y1)", "tr(x1*y2) + 0.5*tr(x2)^2"],
        "samples": 2,
        "flow": {"t_end": 0.1, "dt": 0.01},
        "mapping_class": {"type": "twist", "handle": 1},
        "census": {"abelian": 3, "irreducible": 3}
    });
    let expected = [
        ("sample", "samples.json"),
        ("cohomology", "cohomology.csv"),
        ("bracket", "bracket.json"),
        ("jacobi", "jacobi.json"),
        ("rank-scan", "scan.csv"),
        ("kummer", "kummer.json"),
        ("mcg", "mcg.json"),
        ("flow", "trajectory.csv"),
    ];
    for (command, file) in expected {
        let dir = tempfile::tempdir().unwrap();
        let out = run(dir.path(), &[command, "--threads", "2"], &cfg, None);
        assert_eq!(out.status.code(), Some(0), "{command}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(dir.path().join("out").join(file).exists(), "{command} did not write {file}");
    }
}
