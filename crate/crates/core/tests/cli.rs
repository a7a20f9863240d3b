//! End-to-end checks of the CLI binary: exit codes, determinism, and the
//! on-disk artifacts.

use std::path::Path;
use std::process::Command;

fn uclab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uclab"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const TRACE_CFG: &str = r#"
version = 1
kind = "trace"
seed = 11

[grid]
n = 1
points = 64

[sweep]
m0 = [1.0, 2.0]
m1 = [1.0]
pq = [[inf, inf]]
seeds = 2
"#;

#[test]
fn selftest_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = uclab()
        .args(["selftest", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("name,residual,tolerance,pass"));
    let meta = std::fs::read_to_string(out.join("meta.txt")).unwrap();
    assert!(meta.contains("failures = 0"));
}

#[test]
fn trace_runs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trace.toml");
    write(&cfg, TRACE_CFG);
    for name in ["a", "b"] {
        let status = uclab()
            .args(["trace", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir.path().join("a/results.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/results.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_override_changes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trace.toml");
    write(&cfg, TRACE_CFG);
    for (name, seed) in [("a", "11"), ("b", "12")] {
        let status = uclab()
            .args(["trace", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(dir.path().join(name))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir.path().join("a/results.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/results.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn invalid_config_exits_two_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(&cfg, &TRACE_CFG.replace("version = 1", "version = 9"));
    let output = uclab()
        .args(["trace", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("version"), "{stderr}");
}

#[test]
fn gate_violation_exits_two_naming_the_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(&cfg, &TRACE_CFG.replace("pq = [[inf, inf]]", "pq = [[0.5, inf]]"));
    let output = uclab()
        .args(["trace", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("p > 2n/3"), "{stderr}");
}

#[test]
fn verdict_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    // an impossible spread threshold forces a verdict failure
    write(
        &cfg,
        &format!("{TRACE_CFG}\n[trace]\nspread_max = 1e-9\n"),
    );
    let output = uclab()
        .args(["trace", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn kind_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trace.toml");
    write(&cfg, TRACE_CFG);
    let output = uclab()
        .args(["vanish", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn plots_flag_emits_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("trace.toml");
    write(&cfg, TRACE_CFG);
    let out = dir.path().join("out");
    let status = uclab()
        .args(["trace", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--plots")
        .status()
        .unwrap();
    assert!(status.success());
    let svg = std::fs::read_to_string(out.join("qbar_vs_tau.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn moments_cli_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("moments.toml");
    write(
        &cfg,
        r#"
version = 1
kind = "moments"

[grid]
n = 1
points = 64

[moments]
mu = [[0], [1], [2]]
t = [-1.0, -0.25]
"#,
    );
    let out = dir.path().join("out");
    let status = uclab()
        .args(["moments", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    // odd multi-index row records exactly zero
    assert!(csv.contains("(1),1,0,-1.0000000000000000e0,inf,0.0000000000000000e0,true"));
}
