//! End-to-end checks of the binary: exit-code contract, output determinism,
//! and a fast verification suite.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_torusflux")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn zero_generator_integrates_to_identity_with_zero_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "zero.json", r#"{"kind":"zero"}"#);
    let out = run(
        &[
            "integrate",
            "--generator",
            &spec,
            "--grid",
            "16",
            "--steps",
            "20",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lengths: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/lengths.json")).unwrap())
            .unwrap();
    assert_eq!(lengths["l_inf"].as_f64().unwrap(), 0.0);
    assert_eq!(lengths["l_sym_1inf"].as_f64().unwrap(), 0.0);
}

#[test]
fn malformed_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "broken.json", "{ not json");
    let out = run(&["integrate", "--generator", &spec, "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let missing = run(
        &["integrate", "--generator", "nope.json", "--out", "out"],
        dir.path(),
    );
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "nonsense", "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hodge_suite_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "hodge", "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/verify-hodge.csv")).unwrap();
    assert!(csv.lines().count() >= 3);
    assert!(!csv.contains(",fail,"));
}

#[test]
fn undisplaceable_region_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "energy",
            "--region",
            "strip:0.9",
            "--family",
            "rotations:0.1:0.5:0.1",
            "--grid",
            "32",
            "--steps",
            "10",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "rot.json", r#"{"kind":"rotation","v":[0.3,0.4]}"#);
    for out_dir in ["a", "b"] {
        let out = run(
            &[
                "massflow",
                "--generator",
                &spec,
                "--grid",
                "32",
                "--steps",
                "40",
                "--seed",
                "7",
                "--out",
                out_dir,
            ],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a/massflow.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/massflow.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_file_round_trip_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "n = 1\ngrid_size = 16\ntime_steps = 20\nseed = 3\n",
    )
    .unwrap();
    let spec = write_spec(dir.path(), "rot.json", r#"{"kind":"rotation","v":[0.2,0.0]}"#);
    let out = run(
        &[
            "lengths",
            "--config",
            "run.toml",
            "--generator",
            &spec,
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // bad config value → input error
    std::fs::write(dir.path().join("bad.toml"), "grid_size = 0\n").unwrap();
    let bad = run(
        &["lengths", "--config", "bad.toml", "--generator", &spec, "--out", "out"],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(2));
}
