//! End-to-end CLI tests: config parsing, report fields, exit codes,
//! portrait output, and report determinism.

use std::path::Path;
use std::process::Command;

fn planode() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planode"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

const PHASE_SYSTEM: &str = r#"
[system]
a11 = "0"
a12 = "cos(0.5*t)"
a21 = "-cos(0.5*t)"
a22 = "0"
t0 = 0.0

[run]
horizon = 400.0
"#;

#[test]
fn classify_phase_system_as_oscillatory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.toml", PHASE_SYSTEM);
    let out = tmp.path().join("out");
    let status = planode()
        .args(["classify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rep = report(&out);
    assert_eq!(rep.pointer("/results/classify/oscillation_class").unwrap(), "oscillatory");
}

#[test]
fn stability_of_trig_squared_system_is_unstable() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.toml",
        r#"
[system]
a11 = "0"
a12 = "sin(t)^2"
a21 = "cos(t)^2"
a22 = "0"

[run]
horizon = 200.0
"#,
    );
    let out = tmp.path().join("out");
    let status = planode().args(["stability", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let rep = report(&out);
    assert_eq!(rep.pointer("/results/stability/verdict").unwrap(), "unstable");
}

#[test]
fn malformed_expression_exits_one_with_offset() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.toml",
        r#"
[system]
a11 = "0"
a12 = "sin("
a21 = "0"
a22 = "0"
"#,
    );
    let out = planode().args(["classify", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("offset 4"), "stderr: {err}");
}

#[test]
fn gate_failure_exits_two_and_lists_skip() {
    // harmonic system fails the stability sign gates
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.toml",
        r#"
[system]
a11 = "0"
a12 = "1"
a21 = "-1"
a22 = "0"

[run]
horizon = 50.0
"#,
    );
    let out = tmp.path().join("out");
    let status = planode().args(["stability", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let rep = report(&out);
    assert_eq!(rep["skipped"].as_array().unwrap().len(), 1);
    assert_eq!(rep["skipped"][0]["analysis"], "stability");
}

#[test]
fn riccati_fan_portrait_writes_csvs_with_truncated_members() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.toml",
        r#"
[riccati]
a = "1"
b = "0"
c = "-1"

[run]
horizon = 20.0

[portrait]
family = "riccati-fan"
inits = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]
"#,
    );
    let out = tmp.path().join("out");
    let status = planode().args(["portrait", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let csvs: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("fan_"))
        .collect();
    assert_eq!(csvs.len(), 7);
    assert!(out.join("columns.txt").exists());
    // the member starting below the extremal value blows up early
    let fan0 = std::fs::read_to_string(out.join("fan_000.csv")).unwrap();
    let last_t: f64 =
        fan0.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(last_t < 19.0, "expected truncation, last t = {last_t}");
    // the member starting at zero survives to the horizon
    let fan3 = std::fs::read_to_string(out.join("fan_003.csv")).unwrap();
    let last_t: f64 =
        fan3.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(last_t > 19.9);
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "cfg.toml", PHASE_SYSTEM);
    let mut texts = Vec::new();
    for sub in ["a", "b"] {
        let out = tmp.path().join(sub);
        let status = planode()
            .args(["classify", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .arg("--horizon")
            .arg("120")
            .status()
            .unwrap();
        assert!(status.success());
        let text = std::fs::read_to_string(out.join("report.json")).unwrap();
        let scrubbed: String =
            text.lines().filter(|l| !l.contains("timestamp")).collect::<Vec<_>>().join("\n");
        texts.push(scrubbed);
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn equation_block_reduces_to_system() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.toml",
        r#"
[equation]
r = "1"

[run]
horizon = 100.0
"#,
    );
    let out = tmp.path().join("out");
    let status = planode().args(["classify", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let rep = report(&out);
    assert_eq!(rep.pointer("/results/classify/oscillation_class").unwrap(), "oscillatory");
}

#[test]
fn two_input_blocks_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfg.toml",
        r#"
[system]
a11 = "0"
a12 = "1"
a21 = "-1"
a22 = "0"

[riccati]
a = "1"
b = "0"
c = "1"
"#,
    );
    let out = planode().args(["classify", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exactly one"));
}
