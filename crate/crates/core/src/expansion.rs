//! Boundary expansion `u(x) = c0 + a0 x^{2s-1} + a1 x^{beta_1} + ...` near
//! `x = 0`, fitted to nodal data, and the growth exponent of what is left
//! after the first two terms are removed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this distance of `2s - 1` from zero the functions `1` and `x^{2s-1}`
/// coincide and the second one is replaced by `ln x`.
pub const LOG_SWITCH: f64 = 1e-3;

/// Largest accepted condition number of the scaled least-squares matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecondTerm {
    /// `x^{2s-1}`
    Power,
    /// `ln x`, used when `|2s - 1| < LOG_SWITCH`
    Log,
}

impl SecondTerm {
    pub fn for_order(s: f64) -> Self {
        if (2.0 * s - 1.0).abs() < LOG_SWITCH {
            SecondTerm::Log
        } else {
            SecondTerm::Power
        }
    }

    pub fn eval(self, x: f64, s: f64) -> f64 {
        match self {
            SecondTerm::Power => x.powf(2.0 * s - 1.0),
            SecondTerm::Log => x.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryExpansion {
    pub s: f64,
    pub c0: f64,
    /// Coefficient of the second basis function (see `second_term`).
    pub a0: f64,
    pub a1: f64,
    pub beta1: f64,
    pub second_term: SecondTerm,
    pub window: (f64, f64),
    pub points: usize,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub condition: f64,
}

/// Least squares with column scaling; returns coefficients, rms residual and condition number.
pub(crate) fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let m = y.len();
    let k = columns.len();
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
        return Err(Error::IllConditioned { condition: f64::INFINITY });
    }
    let a = DMatrix::from_fn(m, k, |i, j| columns[j][i] / norms[j]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_column_slice(y);
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Singular(format!("least squares: {e}")))?;
    let res = &a * &sol - &rhs;
    let rms = (res.norm_squared() / m as f64).sqrt();
    let coeffs = sol.iter().zip(&norms).map(|(c, n)| c / n).collect();
    Ok((coeffs, rms, condition))
}

fn window_points(nodes: &[f64], values: &[f64], w: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(w > 0.0 && w <= 0.2) {
        return Err(Error::Invalid(format!("fit window must lie in (0, 0.2], got {w}")));
    }
    if nodes.len() != values.len() {
        return Err(Error::Invalid("nodes and values differ in length".into()));
    }
    let (x, u): (Vec<f64>, Vec<f64>) = nodes
        .iter()
        .zip(values)
        .filter(|(x, _)| **x > 0.0 && **x < w * (1.0 + 1e-12))
        .map(|(x, u)| (*x, *u))
        .unzip();
    if x.len() < 8 {
        return Err(Error::Invalid(format!(
            "only {} nodes inside the window (0, {w}); need at least 8",
            x.len()
        )));
    }
    Ok((x, u))
}

/// Fits `c0 + a0 b(x) + a1 x^{beta1}` to the nodes in `(0, w)`.
pub fn fit_boundary_expansion(
    nodes: &[f64],
    values: &[f64],
    s: f64,
    beta1: f64,
    w: f64,
) -> Result<BoundaryExpansion> {
    let (x, u) = window_points(nodes, values, w)?;
    let second = SecondTerm::for_order(s);
    let cols = vec![
        vec![1.0; x.len()],
        x.iter().map(|&t| second.eval(t, s)).collect(),
        x.iter().map(|&t| t.powf(beta1)).collect(),
    ];
    let (c, residual, condition) = least_squares(&cols, &u)?;
    Ok(BoundaryExpansion {
        s,
        c0: c[0],
        a0: c[1],
        a1: c[2],
        beta1,
        second_term: second,
        window: (0.0, w),
        points: x.len(),
        residual,
        condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HolderStatus {
    Conclusive,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// Median of the per-window slopes.
    pub exponent: f64,
    pub slopes: Vec<f64>,
    pub windows: Vec<(f64, f64)>,
    pub spread: f64,
    /// Exponent of the free power in the refit that produced `c0` and `a0`.
    pub refit_exponent: f64,
    pub c0: f64,
    pub a0: f64,
    pub status: HolderStatus,
    /// The measured growth is faster than `x^{beta1}`: no boundary singularity is visible.
    pub exceeds_beta1: bool,
    pub notes: Vec<String>,
}

/// Dyadic windows `(2^{-j-1} w, 2^{-j} w)`, `j = 0..5`.
pub const HOLDER_WINDOWS: usize = 5;

/// Growth exponent of `u - c0 - a0 b(x)` near `0`.
///
/// `c0` and `a0` are refitted together with a free power `x^gamma` (variable
/// projection over `gamma`), so the estimate does not presuppose `beta1`.
/// Per-window slopes come from log-log regression on the nodes of each
/// dyadic window. `errors` is the nodal discretization error estimate; a
/// window whose remainder is below ten times that is marked inconclusive.
pub fn estimate_boundary_holder(
    nodes: &[f64],
    values: &[f64],
    errors: Option<&[f64]>,
    fit: &BoundaryExpansion,
) -> Result<HolderEstimate> {
    let s = fit.s;
    let w = fit.window.1;
    let (x, u) = window_points(nodes, values, w)?;
    let second = fit.second_term;
    let b: Vec<f64> = x.iter().map(|&t| second.eval(t, s)).collect();

    let rss = |gamma: f64| -> Option<(f64, Vec<f64>)> {
        let cols = vec![vec![1.0; x.len()], b.clone(), x.iter().map(|&t| t.powf(gamma)).collect()];
        least_squares(&cols, &u).ok().map(|(c, r, _)| (r, c))
    };
    let lo = (2.0 * s - 1.0).max(0.0) + 0.05;
    let hi = 4.0;
    let grid = 60;
    let mut best = (f64::INFINITY, lo);
    for i in 0..=grid {
        let g = lo + (hi - lo) * i as f64 / grid as f64;
        if let Some((r, _)) = rss(g) {
            if r < best.0 {
                best = (r, g);
            }
        }
    }
    let step = (hi - lo) / grid as f64;
    let (mut a, mut bnd) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = bnd - phi * (bnd - a);
        let m2 = a + phi * (bnd - a);
        let r1 = rss(m1).map_or(f64::INFINITY, |v| v.0);
        let r2 = rss(m2).map_or(f64::INFINITY, |v| v.0);
        if r1 < r2 {
            bnd = m2;
        } else {
            a = m1;
        }
    }
    let gamma = 0.5 * (a + bnd);
    let (_, coeffs) = rss(gamma).ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
    let (c0, a0) = (coeffs[0], coeffs[1]);

    let mut slopes = Vec::new();
    let mut windows = Vec::new();
    let mut notes = Vec::new();
    let mut inconclusive = false;
    for j in 0..HOLDER_WINDOWS {
        let (wl, wh) = (w * 0.5f64.powi(j as i32 + 1), w * 0.5f64.powi(j as i32));
        let mut lx = Vec::new();
        let mut lr = Vec::new();
        let mut rmax: f64 = 0.0;
        let mut emax: f64 = 0.0;
        for (i, (&xi, &ui)) in nodes.iter().zip(values).enumerate() {
            if xi >= wl && xi <= wh {
                let r = ui - c0 - a0 * second.eval(xi, s);
                rmax = rmax.max(r.abs());
                if let Some(e) = errors {
                    emax = emax.max(e[i]);
                }
                if r != 0.0 {
                    lx.push(xi.ln());
                    lr.push(r.abs().ln());
                }
            }
        }
        if lx.len() < 2 {
            notes.push(format!("window {j} ({wl:e}, {wh:e}) has fewer than two nodes"));
            inconclusive = true;
            continue;
        }
        if errors.is_some() && rmax < 10.0 * emax {
            notes.push(format!(
                "window {j}: remainder {rmax:e} below ten times the error estimate {emax:e}"
            ));
            inconclusive = true;
        }
        let mx = lx.iter().sum::<f64>() / lx.len() as f64;
        let my = lr.iter().sum::<f64>() / lr.len() as f64;
        let sxy: f64 = lx.iter().zip(&lr).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
        slopes.push(sxy / sxx);
        windows.push((wl, wh));
    }
    if slopes.is_empty() {
        return Err(Error::Invalid("no dyadic window contains enough nodes".into()));
    }
    let mut sorted = slopes.clone();
    sorted.sort_by(f64::total_cmp);
    let exponent = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let spread = sorted[sorted.len() - 1] - sorted[0];
    Ok(HolderEstimate {
        exponent,
        slopes,
        windows,
        spread,
        refit_exponent: gamma,
        c0,
        a0,
        status: if inconclusive { HolderStatus::Inconclusive } else { HolderStatus::Conclusive },
        exceeds_beta1: exponent > fit.beta1 + 0.15,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::critical_exponents;
    use crate::mesh::GradedMesh;

    fn sample(f: impl Fn(f64) -> f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mesh = GradedMesh::symmetric(n, 2.0).unwrap();
        let x = mesh.nodes().to_vec();
        let u = x.iter().map(|&t| f(t)).collect();
        (x, u)
    }

    #[test]
    fn exact_data_in_span() {
        let s = 0.75;
        let b1 = critical_exponents(s, 1, 1e-13).unwrap().beta1();
        let (x, u) = sample(|t| 3.0 + 2.0 * t.powf(2.0 * s - 1.0), 128);
        let fit = fit_boundary_expansion(&x, &u, s, b1, 0.2).unwrap();
        assert!((fit.c0 - 3.0).abs() < 1e-8 && (fit.a0 - 2.0).abs() < 1e-8 && fit.a1.abs() < 1e-8);
        assert_eq!(fit.second_term, SecondTerm::Power);
    }

    #[test]
    fn pure_beta1_at_half_order() {
        let s = 0.5;
        let b1 = critical_exponents(s, 1, 1e-13).unwrap().beta1();
        let (x, u) = sample(|t| t.powf(b1), 128);
        let fit = fit_boundary_expansion(&x, &u, s, b1, 0.2).unwrap();
        assert_eq!(fit.second_term, SecondTerm::Log);
        assert!((fit.a1 - 1.0).abs() < 1e-8 && fit.c0.abs() < 1e-8 && fit.a0.abs() < 1e-8);
        let h = estimate_boundary_holder(&x, &u, None, &fit).unwrap();
        assert!((h.exponent - b1).abs() < 0.02, "{h:?}");
        assert!(!h.exceeds_beta1);
    }

    #[test]
    fn smooth_data_is_flagged() {
        let s = 0.3;
        let b1 = critical_exponents(s, 1, 1e-13).unwrap().beta1();
        let (x, u) = sample(|t| t * t, 128);
        let fit = fit_boundary_expansion(&x, &u, s, b1, 0.2).unwrap();
        let h = estimate_boundary_holder(&x, &u, None, &fit).unwrap();
        assert!((h.exponent - 2.0).abs() < 0.02, "{h:?}");
        assert!(h.exceeds_beta1);
    }

    #[test]
    fn too_few_points_and_bad_window() {
        let (x, u) = sample(|t| t, 8);
        assert!(matches!(fit_boundary_expansion(&x, &u, 0.7, 1.7, 0.2), Err(Error::Invalid(_))));
        assert!(fit_boundary_expansion(&x, &u, 0.7, 1.7, 0.5).is_err());
    }

    #[test]
    fn degenerate_basis_is_reported() {
        // beta1 = 2s - 1 duplicates a column
        let (x, u) = sample(|t| t, 128);
        assert!(matches!(
            fit_boundary_expansion(&x, &u, 0.75, 0.5, 0.2),
            Err(Error::IllConditioned { .. })
        ));
    }
}
