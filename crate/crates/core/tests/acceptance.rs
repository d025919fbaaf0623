//! Acceptance suite: every verification suite at its full pinned scale.
//!
//! One test per criterion; each prints a PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`) and asserts success.
//! All checks are exact equalities over finite fields.

use wittlab_core::suites::{run_suite, SuiteConfig};

fn run(criterion: u32, name: &str) {
    let cfg = SuiteConfig {
        seed: 0xACCE97,
        filter: None,
        trials: None,
    };
    let report = run_suite(name, &cfg).expect("known suite");
    let status = if report.passed { "PASS" } else { "FAIL" };
    println!("{status} criterion {criterion:02} [{name}]");
    for line in &report.lines {
        println!("    {line}");
    }
    assert!(
        !report.defect,
        "criterion {criterion} [{name}] hit an internal defect: {:?}",
        report.lines
    );
    assert!(
        report.passed,
        "criterion {criterion} [{name}] failed: {:?}",
        report.lines
    );
}

#[test]
fn criterion_01_charpoly_shape() {
    run(1, "charpoly-shape");
}

#[test]
fn criterion_02_cayley_hamilton() {
    run(2, "cayley-hamilton");
}

#[test]
fn criterion_03_psi_invariance() {
    run(3, "psi-invariance");
}

#[test]
fn criterion_04_semiinvariance() {
    run(4, "semiinvariance");
}

#[test]
fn criterion_05_wedge_identities() {
    run(5, "wedge-identities");
}

#[test]
fn criterion_06_frobenius_semisimple() {
    run(6, "frobenius-semisimple");
}

#[test]
fn criterion_07_regularity_four_way() {
    run(7, "regularity-four-way");
}

#[test]
fn criterion_08_weight_counts() {
    run(8, "weight-counts");
}

#[test]
fn criterion_09_torus_q_operator() {
    run(9, "torus-q-operator");
}

#[test]
fn criterion_10_canonical_form() {
    run(10, "canonical-form");
}

#[test]
fn criterion_11_fibre_smoothness() {
    run(11, "fibre-smoothness");
}

#[test]
fn criterion_12_dickson() {
    run(12, "dickson");
}

#[test]
fn criterion_13_oracles() {
    run(13, "oracles");
}
