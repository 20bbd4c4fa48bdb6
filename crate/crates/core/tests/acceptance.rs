//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass/fail line.

use planode::acceptance;

fn check(r: acceptance::CriterionResult) {
    let status = if r.passed { "PASS" } else { "FAIL" };
    println!("{status} {:02}: {} — {}", r.id, r.name, r.detail);
    assert!(r.passed, "criterion {:02} failed: {}", r.id, r.detail);
}

#[test]
fn criterion_01_oscillation_regimes() {
    check(acceptance::criterion_01());
}

#[test]
fn criterion_02_half_oscillatory() {
    check(acceptance::criterion_02());
}

#[test]
fn criterion_03_singular_with_root_oracles() {
    check(acceptance::criterion_03());
}

#[test]
fn criterion_04_instability_slope() {
    check(acceptance::criterion_04());
}

#[test]
fn criterion_05_extremal_vs_boundary() {
    check(acceptance::criterion_05());
}

#[test]
fn criterion_06_no_survivors() {
    check(acceptance::criterion_06());
}

#[test]
fn criterion_07_frame_identities() {
    check(acceptance::criterion_07());
}

#[test]
fn criterion_08_lifted_ratio_residual() {
    check(acceptance::criterion_08());
}

#[test]
fn criterion_09_divergence_test() {
    check(acceptance::criterion_09());
}

#[test]
fn criterion_10_nonconjugation_corpus() {
    check(acceptance::criterion_10());
}

#[test]
fn criterion_11_ratio_band() {
    check(acceptance::criterion_11());
}

#[test]
fn criterion_12_three_principles() {
    check(acceptance::criterion_12());
}

#[test]
fn criterion_13_envelope_suite() {
    check(acceptance::criterion_13());
}

#[test]
fn criterion_14_distinguished_solutions() {
    check(acceptance::criterion_14());
}
