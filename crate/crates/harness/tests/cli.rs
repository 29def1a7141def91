//! End-to-end CLI checks via the compiled binary.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ragoose"))
}

fn run_tiny(out: &Path, seed: u64) {
    let status = bin()
        .args([
            "run",
            "--problem",
            "synthetic",
            "--algo",
            "ragoose",
            "--alpha",
            "10",
            "--iters",
            "2",
            "--k",
            "3",
            "--reps",
            "2",
            "--seed",
            &seed.to_string(),
            "--tune-every",
            "0",
            "--out",
        ])
        .arg(out)
        .status()
        .expect("binary runs");
    assert!(status.success());
}

#[test]
fn run_is_idempotent_and_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), 11);
    let first = std::fs::read_to_string(dir.path().join("trace_000.csv")).unwrap();
    run_tiny(dir.path(), 11);
    let second = std::fs::read_to_string(dir.path().join("trace_000.csv")).unwrap();
    assert_eq!(first, second);
    assert!(dir.path().join("summary.json").exists());
    assert!(dir.path().join("config.toml").exists());
}

#[test]
fn compare_and_plot_data_work() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_tiny(dir_a.path(), 3);
    run_tiny(dir_b.path(), 4);

    let output = bin()
        .arg("compare")
        .arg(dir_a.path().join("summary.json"))
        .arg(dir_b.path().join("summary.json"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("mean final f(x*)"));
    assert!(text.contains("violations [%]"));

    let output = bin()
        .args(["plot-data", "--kind", "cost-vs-t"])
        .arg(dir_a.path().join("trace_000.csv"))
        .arg(dir_a.path().join("trace_001.csv"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.starts_with("t,statistic,value"));

    // Regret export needs the problem oracles.
    let output = bin()
        .args(["plot-data", "--kind", "regret-vs-t", "--problem", "synthetic"])
        .arg(dir_a.path().join("trace_000.csv"))
        .output()
        .unwrap();
    assert!(output.status.success());
}

#[test]
fn exit_codes_distinguish_config_errors() {
    // Unknown problem id: config error, exit 1.
    let status = bin()
        .args([
            "run", "--problem", "bogus", "--algo", "ragoose", "--out", "/tmp/x",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Unknown plot kind: exit 1.
    let status = bin()
        .args(["plot-data", "--kind", "nope", "somefile.csv"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // Comparing summaries of different problems: exit 1 (config error).
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), 5);
    let status = bin()
        .arg("compare")
        .arg(dir.path().join("summary.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1), "single summary cannot be compared");
}
