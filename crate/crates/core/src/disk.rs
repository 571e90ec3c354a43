//! Radial functions on the unit disk. With `x = r e(theta)`, `y = rho e(theta')`
//! the two angular integrations of `|x - y|^{-2-2s}` collapse to `2 pi W(r, rho)`,
//!
//! ```text
//! W(r, rho) = int_0^{2 pi} (r^2 + rho^2 - 2 r rho cos phi)^{-1-s} dphi
//!           = 2 pi (r + rho)^{-2-2s} 2F1(1 + s, 1/2; 1; 4 r rho / (r + rho)^2),
//! ```
//!
//! so the energy of a radial `u` is a one-dimensional pair integral with
//! weight `2 pi W(r, rho) r rho`, and `W ~ kappa(r) |r - rho|^{-1-2s}` on the diagonal.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galerkin::{assemble_pairs, load_vector, mass_matrix, PairKernel};
use crate::mesh::GradedMesh;
use crate::quadrature::adaptive;
use crate::solver::GalerkinSystem;
use crate::special::{gamma, FracOrder};

/// Reference value of `W` by adaptive quadrature in `phi`.
pub fn radial_weight(r: f64, rho: f64, s: f64) -> Result<f64> {
    FracOrder::new(s)?;
    if !(r >= 0.0 && rho >= 0.0 && r.is_finite() && rho.is_finite()) {
        return Err(Error::Domain(format!("radii must be finite and >= 0, got ({r}, {rho})")));
    }
    if r == rho {
        return Err(Error::Domain(format!(
            "W is singular on the diagonal r = rho = {r}; use the subtracted bilinear form"
        )));
    }
    let d2 = (r - rho) * (r - rho);
    let rr = r * rho;
    let f = |phi: f64| {
        let h = (0.5 * phi).sin();
        (d2 + 4.0 * rr * h * h).powf(-1.0 - s)
    };
    // the integrand varies on the scale |r - rho| / sqrt(r rho) near phi = 0
    let scale = if rr > 0.0 { (d2 / rr).sqrt().min(PI) } else { PI };
    let mut breaks = vec![0.0];
    let mut b = scale;
    while b < PI {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(PI);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += adaptive(f, w[0], w[1], 0.0, 1e-13, 2000).value;
    }
    Ok(2.0 * total)
}

/// Gauss series of `2F1(a, b; c; z)`, used for `|z| <= 1/2`.
fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..400 {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Angular kernel of the radial reduction with its diagonal behaviour factored out.
#[derive(Debug, Clone, Copy)]
pub struct RadialKernel {
    s: f64,
    /// Connection coefficients of `2F1(1+s, 1/2; 1; z)` at `z = 1`.
    conn_regular: f64,
    conn_singular: f64,
    /// `sqrt(pi) Gamma(1/2 + s) / Gamma(1 + s)`, so that `kappa(r) = asym / r`.
    asym: f64,
}

/// Below this distance from `s = 1/2` the connection coefficients blow up and
/// cancel; the kernel falls back to adaptive quadrature there.
const HALF_GUARD: f64 = 1e-2;

impl RadialKernel {
    pub fn new(s: f64) -> Result<Self> {
        FracOrder::new(s)?;
        let sp = PI.sqrt();
        let (conn_regular, conn_singular) = if (s - 0.5).abs() < HALF_GUARD {
            (f64::NAN, f64::NAN)
        } else {
            (gamma(-0.5 - s) / (gamma(-s) * sp), gamma(0.5 + s) / (gamma(1.0 + s) * sp))
        };
        Ok(RadialKernel { s, conn_regular, conn_singular, asym: sp * gamma(0.5 + s) / gamma(1.0 + s) })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Coefficient of `|r - rho|^{-1-2s}` in `W` as `rho -> r`.
    pub fn kappa(&self, r: f64) -> f64 {
        self.asym / r
    }

    /// `W(r, rho) |r - rho|^{1+2s}`, bounded and continuous up to the diagonal.
    pub fn regularized(&self, r: f64, rho: f64) -> f64 {
        let s = self.s;
        let sum = r + rho;
        if sum == 0.0 {
            return 0.0;
        }
        if r == 0.0 || rho == 0.0 {
            // constant integrand: W = 2 pi sum^{-2-2s} and |r - rho| = sum
            return 2.0 * PI / sum;
        }
        let d = (r - rho).abs();
        let z = 4.0 * r * rho / (sum * sum);
        let w = d * d / (sum * sum);
        let nu = 1.0 + s;
        if z <= 0.5 {
            return 2.0 * PI * (d / sum).powf(1.0 + 2.0 * s) / sum * hyp2f1_series(nu, 0.5, 1.0, z);
        }
        if self.conn_regular.is_nan() {
            return radial_weight(r, rho, s).map(|v| v * d.powf(1.0 + 2.0 * s)).unwrap_or(f64::NAN);
        }
        // 2F1(a,b;1;z) = A F(a, b; a+b; 1-z) + B (1-z)^{-1/2-s} F(1-a, 1-b; 1/2-s; 1-z)
        let regular = self.conn_regular * hyp2f1_series(nu, 0.5, 1.5 + s, w);
        let singular = self.conn_singular * hyp2f1_series(-s, 0.5, 0.5 - s, w);
        2.0 * PI / sum * ((d / sum).powf(1.0 + 2.0 * s) * regular + singular)
    }

    /// `W(r, rho)` off the diagonal.
    pub fn weight(&self, r: f64, rho: f64) -> f64 {
        self.regularized(r, rho) / (r - rho).abs().powf(1.0 + 2.0 * self.s)
    }
}

impl PairKernel for RadialKernel {
    fn s(&self) -> f64 {
        self.s
    }

    fn smooth(&self, x: f64, y: f64) -> f64 {
        2.0 * PI * x * y * self.regularized(x, y)
    }
}

/// Radial Galerkin system on `[0, 1]`: `A = (c_{2,s}/2) B` for the kernel
/// `2 pi W r rho`, with mass and moments in the measure `2 pi r dr`.
pub fn assemble_radial(mesh: &GradedMesh, s: f64) -> Result<GalerkinSystem> {
    let order = FracOrder::new(s)?;
    check_disk_order(s)?;
    let nodes = mesh.nodes();
    if nodes[0] != 0.0 || nodes[nodes.len() - 1] != 1.0 {
        return Err(Error::Invalid("radial mesh must span [0, 1]".into()));
    }
    let kernel = RadialKernel::new(s)?;
    let b = assemble_pairs(nodes, &kernel)?;
    let stiffness = b * (0.5 * order.cns(2));
    let mass = mass_matrix(nodes, true) * (2.0 * PI);
    let moments = load_vector(nodes, |_| 2.0 * PI, true);
    Ok(GalerkinSystem { s, mesh: mesh.clone(), stiffness, mass, moments })
}

fn check_disk_order(s: f64) -> Result<()> {
    if s <= 0.5 {
        return Err(Error::Domain(format!(
            "Dirichlet requires s > 1/2 (got s = {s}): for s <= 1/2 boundary values have no trace in H^s"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialSolution {
    pub s: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// `u / (1 - r)^{2s-1}`, `NaN` at `r = 1`.
    pub psi: Vec<f64>,
    pub energy: f64,
}

impl RadialSolution {
    pub fn from_values(s: f64, nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::Invalid("nodes and values must have equal length >= 2".into()));
        }
        let p = 2.0 * s - 1.0;
        let psi = nodes
            .iter()
            .zip(&values)
            .map(|(&r, &u)| if r < 1.0 { u / (1.0 - r).powf(p) } else { f64::NAN })
            .collect();
        Ok(RadialSolution { s, nodes, values, psi, energy: f64::NAN })
    }
}

/// Dirichlet solve `u(1) = 0` of the disk problem for a radial load `f(r)`.
pub fn solve_disk<F: Fn(f64) -> f64 + Sync>(f: F, mesh: &GradedMesh, s: f64) -> Result<RadialSolution> {
    let sys = assemble_radial(mesh, s)?;
    let load: Vec<f64> = load_vector(mesh.nodes(), f, true).iter().map(|b| 2.0 * PI * b).collect();
    let n = load.len();
    let a = sys.stiffness.view((0, 0), (n - 1, n - 1)).into_owned();
    let chol = Cholesky::new(a)
        .ok_or_else(|| Error::Singular("reduced radial stiffness is not positive definite".into()))?;
    let x = chol.solve(&DVector::from_column_slice(&load[..n - 1]));
    let mut values = vec![0.0; n];
    values[..n - 1].copy_from_slice(x.as_slice());
    let energy = 0.5 * sys.energy_form(&values) - values.iter().zip(&load).map(|(u, b)| u * b).sum::<f64>();
    let mut sol = RadialSolution::from_values(s, mesh.nodes().to_vec(), values)?;
    sol.energy = energy;
    Ok(sol)
}

/// Window in `delta = 1 - r` used by [`check_curvature_identity`] by default.
pub const CURVATURE_WINDOW: (f64, f64) = (0.01, 0.3);

/// Relative spread of `psi(1)` across nested sub-windows above which the fit is reported inconclusive.
pub const MAX_DISPERSION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureStatus {
    Ok,
    Inconclusive,
}

/// Boundary value and normal derivative of `psi = u / (1 - r)^{2s-1}` at `r = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub s: f64,
    pub n: usize,
    pub psi1: f64,
    /// `d psi / dr` at `r = 1` (outward normal derivative).
    pub dpsi1: f64,
    pub ratio: f64,
    /// Relative spread of `psi1` over the nested sub-windows.
    pub dispersion: f64,
    pub window: (f64, f64),
    pub points: usize,
    pub status: CurvatureStatus,
}

/// Fits `psi(delta) = psi1 + d delta + c delta^{1+alpha} + e delta^2` on `window`,
/// where `1 + alpha = beta1 - 2s + 1` is the next exponent of the flat profile.
fn fit_psi(delta: &[f64], psi: &[f64], p: f64, window: (f64, f64)) -> Result<(f64, f64, usize)> {
    let (d, y): (Vec<f64>, Vec<f64>) = delta
        .iter()
        .zip(psi)
        .filter(|(d, v)| **d > window.0 && **d < window.1 && v.is_finite())
        .map(|(d, v)| (*d, *v))
        .unzip();
    if d.len() < 8 {
        return Err(Error::Invalid(format!(
            "only {} nodes with 1 - r in ({}, {}); need at least 8",
            d.len(),
            window.0,
            window.1
        )));
    }
    let cols = vec![
        vec![1.0; d.len()],
        d.clone(),
        d.iter().map(|t| t.powf(p)).collect(),
        d.iter().map(|t| t * t).collect(),
    ];
    let (c, _, _) = crate::expansion::least_squares(&cols, &y)?;
    Ok((c[0], -c[1], d.len()))
}

/// Estimates `psi'(1) / psi(1)`; the boundary identity for the unit circle
/// concerns this ratio. `beta1` is the first critical exponent at order `s`.
pub fn check_curvature_identity(
    sol: &RadialSolution,
    beta1: f64,
    window: (f64, f64),
) -> Result<CurvatureReport> {
    let s = sol.s;
    if !(window.0 > 0.0 && window.0 < window.1 && window.1 <= 0.5) {
        return Err(Error::Invalid(format!("curvature window must satisfy 0 < lo < hi <= 0.5, got {window:?}")));
    }
    let p = beta1 - 2.0 * s + 1.0;
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Invalid(format!("beta1 = {beta1} does not give a correction exponent in (1, 2)")));
    }
    let delta: Vec<f64> = sol.nodes.iter().map(|r| 1.0 - r).collect();
    let (psi1, dpsi1, points) = fit_psi(&delta, &sol.psi, p, window)?;
    let (lo, hi) = window;
    let mut spread = vec![psi1];
    for sub in [(lo, 0.5 * hi), (2.0 * lo, hi)] {
        if let Ok((v, _, _)) = fit_psi(&delta, &sol.psi, p, sub) {
            spread.push(v);
        }
    }
    let max = spread.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = spread.iter().copied().fold(f64::INFINITY, f64::min);
    let dispersion = (max - min) / psi1.abs();
    let status = if dispersion > MAX_DISPERSION || spread.len() < 3 {
        CurvatureStatus::Inconclusive
    } else {
        CurvatureStatus::Ok
    };
    Ok(CurvatureReport {
        s,
        n: sol.nodes.len() - 1,
        psi1,
        dpsi1,
        ratio: dpsi1 / psi1,
        dispersion,
        window,
        points,
        status,
    })
}

/// One Richardson step for a quantity converging at first order in `1/n` under doubling.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}

/// `(-Delta)^s_B v` at radius `r < 1` for a radial `v` on the unit disk.
///
/// The neighbourhood `|rho - r| < 1 - r` is paired symmetrically; below
/// `1e-5 (1 - r)` the paired integrand is continued as `C t^{1-2s}`.
pub fn apply_regional_radial<F: Fn(f64) -> f64>(v: F, r: f64, s: f64) -> Result<f64> {
    let order = FracOrder::new(s)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1), got {r}")));
    }
    let k = RadialKernel::new(s)?;
    let delta = (1.0 - r).min(r);
    let vr = v(r);
    let paired =
        |t: f64| (vr - v(r + t)) * k.weight(r, r + t) * (r + t) + (vr - v(r - t)) * k.weight(r, r - t) * (r - t);
    let t0 = 1e-5 * delta;
    let mut total = paired(t0) * t0 / (2.0 - 2.0 * s);
    let mut breaks = vec![t0];
    let mut w = 2.0 * t0;
    while w < 0.5 * delta {
        breaks.push(w);
        w *= 2.0;
    }
    let mut w = 0.5 * delta;
    while w > t0 {
        breaks.push(delta - w);
        w *= 0.5;
    }
    breaks.push(delta);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    for p in breaks.windows(2) {
        total += adaptive(&paired, p[0], p[1], 0.0, 1e-12, 400).value;
    }
    // the unpaired remainder: (0, r - delta) and (r + delta, 1), graded towards the gaps and r = 1
    let single = |rho: f64| (vr - v(rho)) * k.weight(r, rho) * rho;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    if r - delta > 0.0 {
        pieces.push((0.0, r - delta));
    }
    if r + delta < 1.0 {
        pieces.push((r + delta, 1.0));
    }
    for (a, b) in pieces {
        let mut pts = vec![a, b];
        let mut w = 0.5 * (b - a);
        while w > 1e-3 * delta {
            pts.push(a + w);
            pts.push(b - w);
            w *= 0.5;
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for p in pts.windows(2) {
            total += adaptive(&single, p[0], p[1], 0.0, 1e-12, 400).value;
        }
    }
    Ok(order.cns(2) * total)
}

/// The `b` for which `(-Delta)^s_B [delta^{2s-1} (1 + b delta)]` has no `log delta` term
/// at the unit circle: the curvature term `(2s-1)/2 B(3/2, s-1/2) c_{2,s}` over the flat
/// residue `Gamma(2s+1) sin(pi s)/pi`. The corresponding ratio `psi'(1)/psi(1)` is `-b`.
pub fn curvature_log_balance(s: f64) -> Result<f64> {
    let order = FracOrder::new(s)?;
    check_disk_order(s)?;
    let beta = gamma(1.5) * gamma(s - 0.5) / gamma(s + 1.0);
    let curvature = 0.5 * (2.0 * s - 1.0) * beta * order.cns(2);
    let flat = gamma(2.0 * s + 1.0) * crate::special::sin_pi(s) / PI;
    Ok(curvature / flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_special_values() {
        for s in [0.3, 0.75, 0.9] {
            let w = radial_weight(0.5, 0.0, s).unwrap();
            assert!((w - 2.0 * PI * 0.25f64.powf(-1.0 - s)).abs() < 1e-12 * w);
            let a = radial_weight(0.3, 0.8, s).unwrap();
            let b = radial_weight(0.8, 0.3, s).unwrap();
            assert!((a - b).abs() < 1e-13 * a);
        }
        assert!(radial_weight(0.4, 0.4, 0.75).is_err());
        let k = RadialKernel::new(0.75).unwrap();
        let w = radial_weight(0.6, 0.6001, 0.75).unwrap();
        let asym = k.kappa(0.6) * 1e-4f64.powf(-2.5);
        assert!((asym / w - 1.0).abs() < 0.02);
    }

    #[test]
    fn fast_weight_matches_quadrature() {
        for s in [0.55, 0.75, 0.9, 0.3] {
            let k = RadialKernel::new(s).unwrap();
            for (r, rho) in [(0.1, 0.9), (0.5, 0.45), (0.99, 0.999), (0.7, 0.2), (0.3, 0.31), (1.0, 0.98)] {
                let a = radial_weight(r, rho, s).unwrap();
                let b = k.weight(r, rho);
                assert!((a - b).abs() < 1e-11 * a, "s={s} ({r},{rho}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn diagonal_order() {
        let k = RadialKernel::new(0.8).unwrap();
        let r = 0.7;
        let q: Vec<f64> = [1e-3, 1e-5, 1e-7].iter().map(|d| k.weight(r, r + d) * d.powf(2.6) / k.kappa(r)).collect();
        assert!((q[2] - 1.0).abs() < 1e-5 && (q[1] - 1.0).abs() < (q[0] - 1.0).abs());
    }

    #[test]
    fn radial_stiffness_structure() {
        let mesh = GradedMesh::toward_right(12, 2.0).unwrap();
        let sys = assemble_radial(&mesh, 0.75).unwrap();
        let a = &sys.stiffness;
        let m = a.amax();
        assert!((a - a.transpose()).amax() < 1e-12 * m);
        for i in 0..a.nrows() {
            assert!(a.row(i).sum().abs() < 1e-10 * m);
        }
        assert!((sys.moments.iter().sum::<f64>() - PI).abs() < 1e-13);
        assert!(assemble_radial(&mesh, 0.5).is_err());
    }

    #[test]
    fn energy_of_parabola_matches_oracle() {
        // (c_{2,s}/2) int int (u(x) - u(y))^2 |x - y|^{-2-2s} over the disk for
        // u = 1 - |x|^2, reduced analytically along rays and integrated in mpmath
        for (s, want) in [(0.6, 1.096_837_207_157_065), (0.75, 2.073_386_821_709_744_7), (0.9, 3.973_850_598_628_985_5)] {
            let mesh = GradedMesh::toward_right(64, 2.0).unwrap();
            let sys = assemble_radial(&mesh, s).unwrap();
            let u: Vec<f64> = mesh.nodes().iter().map(|r| 1.0 - r * r).collect();
            let e = sys.energy_form(&u);
            assert!((e - want).abs() < 1e-3 * want, "s={s}: {e} vs {want}");
        }
    }

    #[test]
    fn synthetic_quotient() {
        let s = 0.75;
        let nodes = GradedMesh::toward_right(200, 2.0).unwrap().nodes().to_vec();
        let values = nodes.iter().map(|r| (1.0 - r).powf(2.0 * s - 1.0) * (2.0 - r)).collect();
        let sol = RadialSolution::from_values(s, nodes, values).unwrap();
        let rep = check_curvature_identity(&sol, 1.726_051_666, CURVATURE_WINDOW).unwrap();
        assert!((rep.psi1 - 1.0).abs() < 1e-10);
        assert!((rep.ratio + 1.0).abs() < 1e-9, "{}", rep.ratio);
        assert_eq!(rep.status, CurvatureStatus::Ok);
    }

    #[test]
    fn log_balance_is_one_half() {
        for s in [0.55, 0.6, 0.75, 0.9, 0.99] {
            assert!((curvature_log_balance(s).unwrap() - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn disk_solution_is_positive() {
        let mesh = GradedMesh::toward_right(64, 3.0).unwrap();
        let sol = solve_disk(|_| 1.0, &mesh, 0.75).unwrap();
        assert_eq!(sol.values[64], 0.0);
        assert!(sol.values[..64].iter().all(|u| *u > 0.0));
        assert!(sol.psi[32..64].iter().all(|p| p.is_finite() && *p > 0.0));
    }
}
