//! Critical homogeneity exponents `beta_k(s)` of the regional operator on the
//! half-line and the sharp Hoelder threshold `alpha_s = beta_1 - 2s`.
//!
//! `beta_k` for `k >= 1` is the unique zero of `g = h1 - h2` in
//! `(2s-1+k, s+k)`: `h2` has a pole at the left end (so `g -> -inf`) and
//! vanishes at `s + k` where `h1 > 0`. The roots are found by bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{h1, h2, regional_power_coeff, FracOrder};

/// Number of interior samples used to detect a second sign change in a bracket.
const SCAN_SAMPLES: usize = 64;

/// Exponents `beta_0 .. beta_K` for one order `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub s: f64,
    pub beta: Vec<f64>,
    pub alpha_s: f64,
    /// `|h1 - h2|` at each root (`beta_0` is exact and records `0`).
    pub residuals: Vec<f64>,
    /// `|C_reg(beta_k)|` at each root.
    pub coeff_residuals: Vec<f64>,
    /// Bracket used for each root; `beta_0` is analytic and stores `(beta_0, beta_0)`.
    pub brackets: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl ExponentTable {
    pub fn beta0(&self) -> f64 {
        self.beta[0]
    }

    pub fn beta1(&self) -> f64 {
        self.beta[1]
    }

    /// Checks the interval structure of the exponents and returns every violation.
    pub fn violations(&self) -> Vec<String> {
        let s = self.s;
        let b0 = (2.0 * s - 1.0).max(0.0);
        let mut out = Vec::new();
        if self.beta[0] != b0 {
            out.push(format!("beta_0 = {} != max(2s-1, 0) = {b0}", self.beta[0]));
        }
        for k in 1..self.beta.len() {
            let b = self.beta[k];
            let kf = k as f64;
            if self.beta[k - 1] >= b {
                out.push(format!("beta_{} >= beta_{k}", k - 1));
            }
            if !(b > kf + b0 && b < kf + s) {
                out.push(format!("beta_{k} = {b} outside ({}, {})", kf + b0, kf + s));
            }
            if k >= 2 && b <= 1.0 + self.beta[k - 1] {
                out.push(format!("beta_{k} = {b} <= 1 + beta_{}", k - 1));
            }
        }
        let a = self.alpha_s;
        if !(a > 0.0 && a < 1.0 - s) {
            out.push(format!("alpha_s = {a} outside (0, 1-s)"));
        }
        if 2.0 * s + a <= 1.0 {
            out.push(format!("2s + alpha_s = {} <= 1", 2.0 * s + a));
        }
        out
    }
}

/// `g(beta) = h1(beta) - h2(beta)`.
pub fn exponent_gap(beta: f64, s: f64) -> Result<f64> {
    Ok(h1(beta, s)? - h2(beta, s)?)
}

/// Bracket inset from the pole and from the zero of `h2` for the `k`-th root.
fn inset(k: usize) -> f64 {
    1e-6 * (k as f64).max(1.0)
}

/// Computes `beta_0 .. beta_K` with each root refined until the bracket is narrower than `tol`.
pub fn critical_exponents(s: f64, k_max: usize, tol: f64) -> Result<ExponentTable> {
    let order = FracOrder::new(s)?;
    if k_max == 0 {
        return Err(Error::Invalid("need at least one exponent beyond beta_0 (K >= 1)".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let beta0 = (2.0 * s - 1.0).max(0.0);
    let mut beta = vec![beta0];
    let mut residuals = vec![0.0];
    let mut coeff_residuals = vec![regional_power_coeff(beta0, order.s())?.abs()];
    let mut brackets = vec![(beta0, beta0)];
    let mut diagnostics = Vec::new();

    for k in 1..=k_max {
        let kf = k as f64;
        let eps = inset(k);
        let (mut lo, mut hi) = (2.0 * s - 1.0 + kf + eps, s + kf - eps);
        let g_lo = exponent_gap(lo, s)?;
        let g_hi = exponent_gap(hi, s)?;
        if !(g_lo < 0.0 && g_hi > 0.0) {
            let samples = (0..=8)
                .map(|i| {
                    let b = lo + (hi - lo) * i as f64 / 8.0;
                    (b, exponent_gap(b, s).unwrap_or(f64::NAN))
                })
                .collect();
            return Err(Error::Bracket { k, lo, hi, samples });
        }
        let changes = count_sign_changes(lo, hi, s)?;
        if changes != 1 {
            diagnostics.push(format!(
                "k = {k}: {changes} sign changes of h1 - h2 sampled in ({lo}, {hi})"
            ));
        }
        let bracket = (lo, hi);
        let mut iterations = 0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if exponent_gap(mid, s)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
            if iterations > 200 {
                return Err(Error::NoConvergence {
                    iterations,
                    detail: format!("bisection for beta_{k} stalled at ({lo}, {hi})"),
                });
            }
        }
        let root = 0.5 * (lo + hi);
        beta.push(root);
        residuals.push(exponent_gap(root, s)?.abs());
        coeff_residuals.push(regional_power_coeff(root, s)?.abs());
        brackets.push(bracket);
    }
    let alpha_s = beta[1] - 2.0 * s;
    Ok(ExponentTable { s, beta, alpha_s, residuals, coeff_residuals, brackets, diagnostics })
}

fn count_sign_changes(lo: f64, hi: f64, s: f64) -> Result<usize> {
    let mut prev = exponent_gap(lo, s)?;
    let mut changes = 0;
    for i in 1..=SCAN_SAMPLES {
        let b = lo + (hi - lo) * i as f64 / SCAN_SAMPLES as f64;
        let g = exponent_gap(b, s)?;
        if (g > 0.0) != (prev > 0.0) {
            changes += 1;
        }
        prev = g;
    }
    Ok(changes)
}

/// `alpha_s = beta_1 - 2s`.
pub fn alpha_critical(s: f64) -> Result<f64> {
    Ok(critical_exponents(s, 1, 1e-13)?.alpha_s)
}

/// Tables for `s = lo, lo + step, ...` up to and including `hi` (within rounding).
pub fn exponent_atlas(lo: f64, hi: f64, step: f64, k_max: usize, tol: f64) -> Result<Vec<ExponentTable>> {
    if !(step > 0.0) || hi < lo {
        return Err(Error::Invalid(format!("bad sweep {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| critical_exponents(lo + step * i as f64, k_max, tol))
        .collect()
}

/// Consistency report for a candidate exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootReport {
    pub beta: f64,
    pub s: f64,
    /// `|h1 - h2|(beta)`; `None` where `h1` or `h2` is undefined (e.g. at `beta = 2s - 1`).
    pub gap_residual: Option<f64>,
    /// `|C_reg(beta)|`; `None` at a coefficient pole.
    pub coeff_residual: Option<f64>,
    /// Exponent reconstructed from an angular eigenvalue, when one was supplied.
    pub eigen_beta: Option<f64>,
    pub is_root: bool,
}

impl RootReport {
    /// Attaches the exponent recovered from the angular eigenvalue `lambda`.
    pub fn with_eigenvalue(mut self, lambda: f64) -> Self {
        self.eigen_beta = crate::angular::beta_from_lambda(lambda, self.s).ok();
        self
    }
}

/// Evaluates the two algebraic formulations of the exponent equation at `beta`.
pub fn verify_root(beta: f64, s: f64, tol: f64) -> RootReport {
    let gap_residual = exponent_gap(beta, s).ok().map(f64::abs);
    let coeff_residual = regional_power_coeff(beta, s).ok().map(f64::abs);
    let is_root = match (gap_residual, coeff_residual) {
        (_, Some(c)) if c < tol => true,
        (Some(g), _) if g < tol => true,
        _ => false,
    };
    RootReport { beta, s, gap_residual, coeff_residual, eigen_beta: None, is_root }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent bisection on tan(x) = x over (a, b).
    fn tan_root(a: f64, b: f64) -> f64 {
        let (mut lo, mut hi) = (a + 1e-12, b - 1e-9);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m.tan() - m < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn half_order_matches_tangent_equation() {
        use std::f64::consts::PI;
        let t = critical_exponents(0.5, 3, 1e-12).unwrap();
        assert_eq!(t.beta[0], 0.0);
        for k in 1..=3 {
            let kf = k as f64;
            let want = tan_root(kf * PI, (kf + 0.5) * PI) / PI;
            assert!((t.beta[k] - want).abs() < 1e-9, "k={k}: {} vs {want}", t.beta[k]);
        }
        assert!((t.beta[1] - 1.430_296_7).abs() < 1e-7);
        assert!((t.beta[2] - 2.459_024).abs() < 1e-6);
        assert!(t.diagnostics.is_empty());
    }

    #[test]
    fn beta0_is_analytic() {
        let t = critical_exponents(0.75, 1, 1e-10).unwrap();
        assert_eq!(t.beta[0], 0.5);
        let t = critical_exponents(0.3, 1, 1e-10).unwrap();
        assert_eq!(t.beta[0], 0.0);
    }

    #[test]
    fn small_order_exponents_sit_in_unit_windows() {
        let t = critical_exponents(0.3, 3, 1e-10).unwrap();
        for k in 1..=3 {
            let kf = k as f64;
            assert!(t.beta[k] > kf && t.beta[k] < kf + 0.3);
        }
    }

    #[test]
    fn sweep_has_no_violations() {
        for s in [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9] {
            let t = critical_exponents(s, 5, 1e-10).unwrap();
            assert!(t.violations().is_empty(), "s={s}: {:?}", t.violations());
            for k in 1..=5 {
                // |g'| grows like pi^2 / sin^2 near the pole, so a 1e-10 bracket leaves ~1e-9 in g
                assert!(t.residuals[k] < 1e-8, "s={s} k={k}: {}", t.residuals[k]);
                assert!(t.coeff_residuals[k] < 1e-7);
            }
        }
    }

    #[test]
    fn beta1_is_continuous_in_s() {
        let mut prev: Option<f64> = None;
        for i in 1..100 {
            let s = i as f64 / 100.0;
            let b = critical_exponents(s, 1, 1e-10).unwrap().beta[1];
            if let Some(p) = prev {
                assert!((b - p).abs() < 0.05, "jump at s = {s}");
            }
            prev = Some(b);
        }
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_critical(0.5).unwrap();
        assert!((a - 0.430_296_653_124_2).abs() < 1e-10);
        // first positive solution of 1 + a = tan(pi a) / pi
        assert!((1.0 + a - (std::f64::consts::PI * a).tan() / std::f64::consts::PI).abs() < 1e-8);
        let a9 = alpha_critical(0.9).unwrap();
        assert!(a9 > 0.0 && a9 < 0.1);
        let a2 = alpha_critical(0.2).unwrap();
        assert!(0.4 + a2 > 1.0);
    }

    #[test]
    fn verify_root_reports() {
        for s in [0.2, 0.5, 0.8] {
            let b0 = (2.0 * s - 1.0f64).max(0.0);
            let r = verify_root(b0, s, 1e-10);
            assert!(r.coeff_residual.unwrap() < 1e-10);
            assert!(r.is_root);
        }
        let b1 = critical_exponents(0.5, 1, 1e-13).unwrap().beta[1];
        let r = verify_root(b1, 0.5, 1e-8);
        assert!(r.gap_residual.unwrap() < 1e-8 && r.coeff_residual.unwrap() < 1e-8);
        let r = verify_root(b1 + 0.1, 0.5, 1e-8);
        assert!(r.gap_residual.unwrap() > 1e-2 && r.coeff_residual.unwrap() > 1e-2);
        assert!(!r.is_root);
    }

    #[test]
    fn invalid_arguments() {
        assert!(matches!(critical_exponents(0.5, 0, 1e-8), Err(Error::Invalid(_))));
        assert!(matches!(critical_exponents(1.2, 2, 1e-8), Err(Error::InvalidOrder(_))));
        assert!(matches!(critical_exponents(0.5, 2, 0.0), Err(Error::Invalid(_))));
    }

    #[test]
    fn atlas_rows() {
        let rows = exponent_atlas(0.1, 0.9, 0.1, 2, 1e-10).unwrap();
        assert_eq!(rows.len(), 9);
        assert!((rows[8].s - 0.9).abs() < 1e-12);
    }
}
