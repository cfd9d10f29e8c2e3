//! One test per numbered acceptance criterion. Each prints a single
//! PASS/FAIL line with its measurements; run with `--nocapture` to see them.
//!
//! Set `NONRAD_FAST=1` for the shortened ladders.

use nonrad_core::verify::run_criterion;

fn check(id: u32) {
    let fast = std::env::var("NONRAD_FAST").map(|v| v == "1").unwrap_or(false);
    let res = run_criterion(id, fast);
    println!("{res}");
    assert!(res.passed, "criterion {id} failed: {}", res.measured);
}

#[test]
fn criterion_01_isometry() {
    check(1);
}

#[test]
fn criterion_02_closed_form_anchors() {
    check(2);
}

#[test]
fn criterion_03_roundtrip() {
    check(3);
}

#[test]
fn criterion_04_ground_state() {
    check(4);
}

#[test]
fn criterion_05_cross_validation() {
    check(5);
}

#[test]
fn criterion_06_first_order() {
    check(6);
}

#[test]
fn criterion_07_second_order() {
    check(7);
}

#[test]
fn criterion_08_translation() {
    check(8);
}

#[test]
fn criterion_09_uniqueness() {
    check(9);
}

#[test]
fn criterion_10_time_symmetry() {
    check(10);
}

#[test]
fn criterion_11_universal_overlap() {
    check(11);
}
