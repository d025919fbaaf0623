//! End-to-end checks of the binary: exit codes, spec'd outputs, and
//! byte-level determinism of structured records.

use std::process::{Command, Output};

fn wittlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn invariants_example() {
    let out = wittlab(&["--p", "5", "--n", "1", "invariants", "d1"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("psi = [0]"));
    assert!(text.contains("delta = 4"));
    assert!(text.contains("delta_minors = [1,0]"));
    assert!(text.contains("nilpotent = true"));
}

#[test]
fn regular_example() {
    let out = wittlab(&["--p", "5", "--n", "1", "regular", "x1^2*d1"]);
    assert!(out.status.success(), "non-regular input still exits 0");
    let text = stdout_of(&out);
    assert!(text.contains("consensus = false"));
    assert!(text.contains("kernel_dim = 2"));
    assert!(text.contains("jordan_profile = [4, 1]"));
}

#[test]
fn canonical_example_and_rejection() {
    let out = wittlab(&["--p", "5", "--n", "1", "canonical", "(1+x1)*d1"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("r = 0"));
    assert!(text.contains("eps = [1]"));

    let out = wittlab(&["--p", "5", "--n", "1", "canonical", "x1^2*d1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fibre_exhaustive_partition() {
    let out = wittlab(&[
        "--p",
        "5",
        "--n",
        "1",
        "fibre",
        "--eta",
        "4",
        "--mode",
        "exhaustive",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("total = 3125"));
    assert!(text.contains("smooth = true"));
    assert!(text.contains("violations = 0"));
}

#[test]
fn structured_output_is_byte_identical() {
    let args = [
        "--p",
        "5",
        "--n",
        "1",
        "--format",
        "structured",
        "--seed",
        "9",
        "fibre",
        "--eta",
        "0",
        "--mode",
        "sample",
        "--trials",
        "50",
    ];
    let a = wittlab(&args);
    let b = wittlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout_of(&a).contains("\"schema\":\"wittlab/1\""));
}

#[test]
fn verify_single_suite() {
    let out = wittlab(&[
        "--p", "5", "--n", "1", "--seed", "3", "--trials", "10", "verify", "--suite", "dickson",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout_of(&out).contains("PASS dickson"));
}

#[test]
fn usage_errors_exit_two() {
    // unknown flag (clap)
    let out = wittlab(&["--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // syntax error in the expression
    let out = wittlab(&["--p", "5", "--n", "1", "invariants", "1 + @"]);
    assert_eq!(out.status.code(), Some(2));
    // structured randomized command without a seed
    let out = wittlab(&[
        "--p",
        "5",
        "--n",
        "1",
        "--format",
        "structured",
        "fibre",
        "--eta",
        "0",
        "--mode",
        "sample",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // excluded parameters
    let out = wittlab(&["--p", "3", "--n", "1", "invariants", "d1"]);
    assert_eq!(out.status.code(), Some(2));
    // zero trials is rejected
    let out = wittlab(&["--p", "5", "--n", "1", "--seed", "1", "--trials", "0", "verify", "--suite", "oracles"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn apply_automorphism_file() {
    let path = std::env::temp_dir().join(format!("wittlab_aut_{}.txt", std::process::id()));
    std::fs::write(&path, "# conjugators\nx1 -> x1 + x1^2\nx1 -> 2*x1\n").unwrap();
    let path_s = path.to_str().unwrap();
    // psi is conjugation-invariant: (1+x1)*d1 has psi = [4] before and after
    let out = wittlab(&[
        "--p",
        "5",
        "--n",
        "1",
        "--apply",
        path_s,
        "invariants",
        "(1+x1)*d1",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout_of(&out).contains("psi = [4]"));
    // and so is the regularity verdict of a non-regular input
    let out = wittlab(&[
        "--p", "5", "--n", "1", "--apply", path_s, "regular", "x1^2*d1",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("consensus = false"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn weights_standard_torus() {
    let out = wittlab(&["--p", "3", "--n", "2", "weights", "--torus", "t0"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("ring weights (9)"));
    assert!(text.contains("derivation-algebra weights (9)"));

    // generator syntax
    let out = wittlab(&["--p", "3", "--n", "2", "weights", "--torus", "x1*d1; x2*d2"]);
    assert!(out.status.success());
}
