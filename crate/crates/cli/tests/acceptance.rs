//! Acceptance criteria, one test each. Every test prints a PASS/FAIL line
//! before asserting, so `cargo test --test acceptance -- --nocapture` gives
//! the full report.

use std::process::Command;

use ricci_dynamo::criteria::{self, CriterionOutcome};

fn check(outcome: CriterionOutcome) {
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn criterion_01_r1212_analytic_vs_numeric() {
    check(criteria::r1212_analytic_vs_numeric());
}

#[test]
fn criterion_02_gauss_sign_law() {
    check(criteria::gauss_sign_law());
}

#[test]
fn criterion_03_flat_annihilation() {
    check(criteria::flat_annihilation());
}

#[test]
fn criterion_04_sphere_oracle() {
    check(criteria::sphere_oracle());
}

#[test]
fn criterion_05_ricci_flow_exactness() {
    check(criteria::ricci_flow_exactness());
}

#[test]
fn criterion_06_diagonal_round_trip() {
    check(criteria::diagonal_round_trip());
}

#[test]
fn criterion_07_spectrum_constraint_harness() {
    check(criteria::spectrum_constraint_harness());
}

#[test]
fn criterion_08_chicone_latushkin_limit() {
    check(criteria::chicone_latushkin_limit());
}

#[test]
fn criterion_09_lyapunov_round_trip() {
    check(criteria::lyapunov_round_trip());
}

fn tube_csv(dir: &std::path::Path, name: &str) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_ricci-dynamo"))
        .args([
            "tube",
            "--sweep",
            "s=0:1:4",
            "--sweep",
            "theta=0:6.283185307179586:9",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success(), "tube run failed: {status}");
    std::fs::read(out).expect("tube output written")
}

#[test]
fn criterion_10_cli_determinism() {
    let verify = Command::new(env!("CARGO_BIN_EXE_ricci-dynamo"))
        .arg("verify")
        .output()
        .expect("binary runs");
    let code = verify.status.code();
    let dir = tempfile::tempdir().unwrap();
    let a = tube_csv(dir.path(), "a.csv");
    let b = tube_csv(dir.path(), "b.csv");
    let passed = code == Some(0) && a == b && !a.is_empty();
    let outcome = CriterionOutcome {
        id: 10,
        title: "CLI determinism",
        passed,
        detail: format!(
            "verify exit code {code:?}, tube outputs identical = {}",
            a == b
        ),
    };
    check(outcome);
}
