use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn driftwave(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftwave"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("case.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const CARTESIAN: &str = r#"
mode = "simulate_cartesian"
[grid]
cells = [4, 4, 16]
[drift]
mach = 0.5
[time]
dt = 0.01
t_end = 0.1
"#;

#[test]
fn cartesian_run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = driftwave(&["simulate"], &write_config(tmp.path(), CARTESIAN), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("o/report.csv")).unwrap();
    assert!(csv.starts_with("name,anchor,residual,threshold,status"));
    let spectral = std::fs::read_to_string(tmp.path().join("o/spectral.csv")).unwrap();
    assert!(spectral.lines().count() > 1);
    assert!(tmp.path().join("o/trajectory.csv").exists());
}

#[test]
fn misspelled_key_is_reported_with_suggestion() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CARTESIAN.replace("mach", "machh"));
    let out = driftwave(&["simulate"], &cfg, &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("drift.machh") && err.contains("did you mean `mach`"), "{err}");
}

#[test]
fn step_longer_than_horizon_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CARTESIAN.replace("dt = 0.01", "dt = 0.5"));
    let out = driftwave(&["simulate"], &cfg, &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("time.dt") && err.contains("time.t_end"), "{err}");
}

#[test]
fn sonic_transform_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = driftwave(&["simulate"], &scenario("transform_sonic.toml"), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular transform"));
}

#[test]
fn subcommand_must_match_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let out = driftwave(&["verify"], &scenario("cartesian_supersonic.toml"), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = driftwave(&["simulate"], &tmp.path().join("absent.toml"), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_override_changes_random_runs_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenario("pipe_variable_drift.toml");
    let run = |seed: &str, dir: &str| {
        let out = driftwave(&["simulate", "--seed", seed], &cfg, &tmp.path().join(dir));
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(tmp.path().join(dir).join("trajectory.csv")).unwrap()
    };
    let (a, b, c) = (run("1", "a"), run("1", "b"), run("2", "c"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn verify_calculus_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = driftwave(&["verify"], &scenario("verify_calculus.toml"), &tmp.path().join("o"));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS") && !text.contains("FAIL"));
}
