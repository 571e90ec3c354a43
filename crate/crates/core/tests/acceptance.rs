//! The ten acceptance checks. Run with
//! `cargo test --release -p regfrac --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use regfrac::selftest::{self, Criterion};

fn check(c: Criterion) {
    println!("{c}");
    assert!(c.passed, "criterion {} failed: {}", c.id, c.detail);
}

#[test]
fn c01_exponents_at_one_half() {
    check(selftest::exponents_at_half());
}

#[test]
fn c02_exponent_intervals() {
    check(selftest::exponent_intervals());
}

#[test]
fn c03_kernel_identities() {
    check(selftest::kernel_identities());
}

#[test]
fn c04_operator_cross_validation() {
    check(selftest::operator_cross_validation());
}

#[test]
fn c05_angular_eigenproblem() {
    check(selftest::angular_eigenproblem());
}

#[test]
fn c06_boundary_formula() {
    check(selftest::boundary_formula());
}

#[test]
fn c07_neumann_structure() {
    check(selftest::neumann_structure());
}

#[test]
fn c08_dirichlet_structure() {
    check(selftest::dirichlet_structure());
}

#[test]
fn c09_holder_exponent() {
    check(selftest::holder_exponent());
}

#[test]
fn c10_curvature_identity() {
    check(selftest::curvature_identity());
}
