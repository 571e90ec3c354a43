//! Weighted angular eigenproblem on `(0, pi)`:
//!
//! ```text
//! -(sin(t)^{1-2s} psi')' = lambda sin(t)^{1-2s} psi,
//! -lim_{t->0} sin(t)^{1-2s} psi'(t) = kappabar_s a_s psi(0),   psi(pi) = 0,
//! ```
//!
//! discretized with piecewise-linear elements. The Robin condition enters as
//! a rank-one correction of the stiffness matrix, the Dirichlet node at `pi`
//! is eliminated. Both matrices are tridiagonal, so eigenvalues come from
//! Sturm-count bisection on the pencil and eigenvectors from inverse iteration.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre, Rule};
use crate::special::FracOrder;

const QUAD_POINTS: usize = 20;

/// Nodes `0 = t_0 < ... < t_n = pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMesh {
    nodes: Vec<f64>,
    grading: f64,
}

impl AngularMesh {
    /// `n` elements, refined with exponent `mu >= 1` towards both `0` and `pi`.
    pub fn graded(n: usize, mu: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("angular mesh needs at least one element".into()));
        }
        if !(mu >= 1.0) {
            return Err(Error::Invalid(format!("grading exponent must be >= 1, got {mu}")));
        }
        let nodes = (0..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                let g = if t <= 0.5 {
                    0.5 * (2.0 * t).powf(mu)
                } else {
                    1.0 - 0.5 * (2.0 * (1.0 - t)).powf(mu)
                };
                PI * g
            })
            .collect::<Vec<_>>();
        let mut m = AngularMesh { nodes, grading: mu };
        m.nodes[0] = 0.0;
        m.nodes[n] = PI;
        Ok(m)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::graded(n, 1.0)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes[0] != 0.0 || *nodes.last().unwrap() != PI {
            return Err(Error::Invalid("angular mesh must start at 0 and end at pi".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("angular mesh nodes must be strictly increasing".into()));
        }
        Ok(AngularMesh { nodes, grading: f64::NAN })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }
}

/// Tridiagonal stiffness/mass pair on the free nodes `t_0 .. t_{n-1}`.
#[derive(Debug, Clone)]
pub struct AngularSystem {
    pub s: f64,
    pub mesh: AngularMesh,
    pub k_diag: Vec<f64>,
    pub k_off: Vec<f64>,
    pub m_diag: Vec<f64>,
    pub m_off: Vec<f64>,
    /// `kappabar_s a_s`, already subtracted from `k_diag[0]`.
    pub robin: f64,
}

impl AngularSystem {
    pub fn dim(&self) -> usize {
        self.k_diag.len()
    }

    pub fn stiffness_dense(&self) -> DMatrix<f64> {
        tridiag_dense(&self.k_diag, &self.k_off)
    }

    pub fn mass_dense(&self) -> DMatrix<f64> {
        tridiag_dense(&self.m_diag, &self.m_off)
    }

    /// Discrete weighted inner product `x^T M y` on the free nodes.
    pub fn mass_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.m_diag[i] * x[i] * y[i];
            if i + 1 < n {
                acc += self.m_off[i] * (x[i] * y[i + 1] + x[i + 1] * y[i]);
            }
        }
        acc
    }

    /// Number of eigenvalues of the pencil strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..n {
            let a = self.k_diag[i] - sigma * self.m_diag[i];
            d = if i == 0 {
                a
            } else {
                let b = self.k_off[i - 1] - sigma * self.m_off[i - 1];
                a - b * b / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + 1e-300);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

fn tridiag_dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
    let n = diag.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    m
}

/// Assembles the weighted stiffness (with the Robin term) and mass matrices.
pub fn assemble_angular(order: &FracOrder, mesh: &AngularMesh) -> Result<AngularSystem> {
    let s = order.s();
    let p = 1.0 - 2.0 * s;
    let n = mesh.elements();
    let nodes = mesh.nodes();

    let interior = gauss_legendre(QUAD_POINTS);
    let left = gauss_jacobi(QUAD_POINTS, 0.0, p)?;
    let right = gauss_jacobi(QUAD_POINTS, p, 0.0)?;
    let both = gauss_jacobi(QUAD_POINTS, p, p)?;

    // full element matrices on nodes 0..=n, the row/column of node n dropped later
    let mut kd = vec![0.0; n + 1];
    let mut ko = vec![0.0; n];
    let mut md = vec![0.0; n + 1];
    let mut mo = vec![0.0; n];

    for e in 0..n {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        let at_left = e == 0;
        let at_right = e + 1 == n;
        let (rule, pl, pr): (&Rule, f64, f64) = match (at_left, at_right) {
            (true, true) => (&both, p, p),
            (true, false) => (&left, p, 0.0),
            (false, true) => (&right, 0.0, p),
            (false, false) => (&interior, 0.0, 0.0),
        };
        // weight divided by the singular factors the rule already carries
        let smooth = |t: f64| -> f64 {
            let mut v = t.sin();
            let mut base = 1.0;
            if pl != 0.0 {
                base *= t;
            }
            if pr != 0.0 {
                base *= PI - t;
            }
            v /= base;
            v.powf(p)
        };
        let scale = (0.5 * h).powf(1.0 + pl + pr);
        let c = 0.5 * (a + b);
        let (mut w0, mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0, 0.0);
        for (x, wq) in rule.nodes.iter().zip(&rule.weights) {
            let t = c + 0.5 * h * x;
            let phi1 = 0.5 * (1.0 + x);
            let phi0 = 1.0 - phi1;
            let wt = wq * smooth(t);
            w0 += wt;
            m00 += wt * phi0 * phi0;
            m01 += wt * phi0 * phi1;
            m11 += wt * phi1 * phi1;
        }
        let (w0, m00, m01, m11) = (w0 * scale, m00 * scale, m01 * scale, m11 * scale);
        if !(w0.is_finite() && m00.is_finite() && m11.is_finite()) {
            return Err(Error::Singular(format!(
                "non-finite weighted integral on element {e} ({a}, {b})"
            )));
        }
        let k = w0 / (h * h);
        kd[e] += k;
        kd[e + 1] += k;
        ko[e] -= k;
        md[e] += m00;
        md[e + 1] += m11;
        mo[e] += m01;
    }
    let robin = order.kappabar() * order.a_s();
    kd[0] -= robin;
    kd.truncate(n);
    md.truncate(n);
    ko.truncate(n - 1);
    mo.truncate(n - 1);
    Ok(AngularSystem {
        s,
        mesh: mesh.clone(),
        k_diag: kd,
        k_off: ko,
        m_diag: md,
        m_off: mo,
        robin,
    })
}

/// One eigenpair; `psi` holds nodal values on every mesh node including `psi(pi) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub k: usize,
    pub lambda: f64,
    pub psi: Vec<f64>,
}

/// Lowest `n_modes` eigenpairs, `M`-normalized, with `psi(0) >= 0`.
pub fn eigen_solve(sys: &AngularSystem, n_modes: usize) -> Result<Vec<EigenPair>> {
    let n = sys.dim();
    if n_modes == 0 || n_modes > n {
        return Err(Error::Invalid(format!(
            "requested {n_modes} modes from a system of dimension {n}"
        )));
    }
    let mut lo = -1.0;
    let mut guard = 0;
    while sys.count_below(lo) > 0 {
        lo *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoConvergence {
                iterations: guard,
                detail: "no lower bound for the spectrum".into(),
            });
        }
    }
    let mut hi = 1.0;
    guard = 0;
    while sys.count_below(hi) < n_modes {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoConvergence {
                iterations: guard,
                detail: "no upper bound for the requested modes".into(),
            });
        }
    }

    let mut pairs: Vec<EigenPair> = Vec::with_capacity(n_modes);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_modes);
    for k in 0..n_modes {
        let lambda = bisect_eigenvalue(sys, k, lo, hi)?;
        let mut v = inverse_iteration(sys, lambda, &vectors)?;
        if v[0] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let mut psi = v.clone();
        psi.push(0.0);
        vectors.push(v);
        pairs.push(EigenPair { k, lambda, psi });
    }
    Ok(pairs)
}

fn bisect_eigenvalue(sys: &AngularSystem, k: usize, lo0: f64, hi0: f64) -> Result<f64> {
    // invariant: count(lo) <= k < count(hi)
    let (mut lo, mut hi) = (lo0, hi0);
    for it in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * lo.abs().max(hi.abs()) {
            return Ok(mid);
        }
        if sys.count_below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if it == 399 {
            return Err(Error::NoConvergence {
                iterations: it,
                detail: format!("eigenvalue {k} bracket ({lo}, {hi})"),
            });
        }
    }
    Ok(0.5 * (lo + hi))
}

fn inverse_iteration(sys: &AngularSystem, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = sys.dim();
    let shift = lambda + 1e-10 * lambda.abs().max(1.0);
    let sub: Vec<f64> = (0..n - 1).map(|i| sys.k_off[i] - shift * sys.m_off[i]).collect();
    let diag: Vec<f64> = (0..n).map(|i| sys.k_diag[i] - shift * sys.m_diag[i]).collect();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let mut change = f64::INFINITY;
    for it in 0..8 {
        let rhs = mass_apply(sys, &x);
        let mut y = solve_tridiagonal(&sub, &diag, &sub, &rhs)
            .ok_or_else(|| Error::Singular(format!("inverse iteration near lambda = {lambda}")))?;
        for p in previous {
            let c = sys.mass_inner(&y, p);
            y.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        let norm = sys.mass_inner(&y, &y).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Singular(format!("inverse iteration collapsed near lambda = {lambda}")));
        }
        y.iter_mut().for_each(|a| *a /= norm);
        let sign = if sys.mass_inner(&y, &x) < 0.0 { -1.0 } else { 1.0 };
        change = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (sign * a - b).abs())
            .fold(0.0, f64::max);
        x = y.into_iter().map(|a| sign * a).collect();
        if it >= 2 && change < 1e-12 {
            return Ok(x);
        }
    }
    if change < 1e-8 {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            iterations: 8,
            detail: format!("inverse iteration near lambda = {lambda}: last change {change:e}"),
        })
    }
}

fn mass_apply(sys: &AngularSystem, x: &[f64]) -> Vec<f64> {
    let n = sys.dim();
    (0..n)
        .map(|i| {
            let mut v = sys.m_diag[i] * x[i];
            if i > 0 {
                v += sys.m_off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += sys.m_off[i] * x[i + 1];
            }
            v
        })
        .collect()
}

/// Solves a tridiagonal system with partial pivoting (`dl` sub-, `du` super-diagonal).
pub(crate) fn solve_tridiagonal(dl: &[f64], d: &[f64], du: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = d.len();
    let mut dl = dl.to_vec();
    let mut d = d.to_vec();
    let mut du = du.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return None;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            // swap rows i and i+1
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Some(x)
}

/// `beta = (2s-1)/2 + sqrt(lambda + ((2s-1)/2)^2)`; small negative radicands are clipped.
pub fn beta_from_lambda(lambda: f64, s: f64) -> Result<f64> {
    let h = (2.0 * s - 1.0) / 2.0;
    let rad = lambda + h * h;
    if rad < -1e-9 {
        return Err(Error::Domain(format!(
            "lambda = {lambda} gives a negative radicand {rad:e} for s = {s}"
        )));
    }
    Ok(h + rad.max(0.0).sqrt())
}

/// `lambda = beta (beta - 2s + 1)`, the inverse of [`beta_from_lambda`] on `beta >= beta_0`.
pub fn lambda_from_beta(beta: f64, s: f64) -> f64 {
    beta * (beta - 2.0 * s + 1.0)
}

/// Runs mesh construction, assembly and the eigen solve in one go.
pub fn angular_spectrum(s: f64, n: usize, mu: f64, n_modes: usize) -> Result<Vec<EigenPair>> {
    let order = FracOrder::new(s)?;
    let mesh = AngularMesh::graded(n, mu)?;
    let sys = assemble_angular(&order, &mesh)?;
    eigen_solve(&sys, n_modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Cholesky, SymmetricEigen};

    /// Dense generalized eigenvalues through Cholesky of the mass matrix.
    fn dense_eigenvalues(sys: &AngularSystem) -> Vec<f64> {
        let m = sys.mass_dense();
        let k = sys.stiffness_dense();
        let l = Cholesky::new(m).unwrap().l();
        let li = l.clone().try_inverse().unwrap();
        let c = &li * k * li.transpose();
        let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn half_order_uniform_mesh_is_standard_fem() {
        let order = FracOrder::new(0.5).unwrap();
        let n = 8;
        let mesh = AngularMesh::uniform(n).unwrap();
        let sys = assemble_angular(&order, &mesh).unwrap();
        let h = PI / n as f64;
        assert!((sys.robin - 1.0 / PI).abs() < 1e-14);
        assert!((sys.k_diag[0] - (1.0 / h - 1.0 / PI)).abs() < 1e-12);
        for i in 1..n {
            assert!((sys.k_diag[i] - 2.0 / h).abs() < 1e-12);
        }
        for o in &sys.k_off {
            assert!((o + 1.0 / h).abs() < 1e-12);
        }
        assert!((sys.m_diag[1] - 2.0 * h / 3.0).abs() < 1e-13);
        assert!((sys.m_off[0] - h / 6.0).abs() < 1e-13);
        // Dirichlet node eliminated
        assert_eq!(sys.dim(), n);
    }

    #[test]
    fn two_element_entries_match_quadrature() {
        // frozen from 30-digit tanh-sinh quadrature of the weighted integrals
        let order = FracOrder::new(0.7).unwrap();
        let mesh = AngularMesh::uniform(2).unwrap();
        let sys = assemble_angular(&order, &mesh).unwrap();
        let want_w0 = 2.277_221_543_981_086; // int_0^{pi/2} sin^{-0.4}
        let h = PI / 2.0;
        assert!((sys.k_diag[0] + sys.robin - want_w0 / (h * h)).abs() < 1e-12);
        let want_m00 = 1.061_118_933_028_000_3; // int sin^{-0.4} (1 - t/h)^2
        assert!((sys.m_diag[0] - want_m00).abs() < 1e-12, "{}", sys.m_diag[0]);
        let want_m01 = 0.329_296_825_479_998_65; // int sin^{-0.4} (1 - t/h)(t/h)
        assert!((sys.m_off[0] - want_m01).abs() < 1e-12, "{}", sys.m_off[0]);
    }

    #[test]
    fn sturm_bisection_matches_dense_solver() {
        for s in [0.3, 0.5, 0.8] {
            let order = FracOrder::new(s).unwrap();
            let mesh = AngularMesh::graded(40, 2.0).unwrap();
            let sys = assemble_angular(&order, &mesh).unwrap();
            let dense = dense_eigenvalues(&sys);
            let pairs = eigen_solve(&sys, 4).unwrap();
            for p in &pairs {
                let d = dense[p.k];
                assert!((p.lambda - d).abs() < 1e-9 * d.abs().max(1.0), "s={s} k={}", p.k);
            }
        }
    }

    #[test]
    fn eigenvectors_are_normalized_and_orthogonal() {
        let order = FracOrder::new(0.65).unwrap();
        let mesh = AngularMesh::graded(64, 2.0).unwrap();
        let sys = assemble_angular(&order, &mesh).unwrap();
        let pairs = eigen_solve(&sys, 4).unwrap();
        for p in &pairs {
            let v = &p.psi[..sys.dim()];
            assert!((sys.mass_inner(v, v) - 1.0).abs() < 1e-10);
            assert!(p.psi[0] >= 0.0);
            assert_eq!(*p.psi.last().unwrap(), 0.0);
            for q in &pairs {
                if q.k != p.k {
                    assert!(sys.mass_inner(v, &q.psi[..sys.dim()]).abs() < 1e-8);
                }
            }
        }
        assert!(pairs.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn half_order_ground_state_is_linear() {
        let pairs = angular_spectrum(0.5, 32, 1.0, 1).unwrap();
        let mesh = AngularMesh::uniform(32).unwrap();
        let p = &pairs[0];
        let c = p.psi[0] / PI;
        for (t, v) in mesh.nodes().iter().zip(&p.psi) {
            assert!((v - c * (PI - t)).abs() < 1e-8, "{t}: {v}");
        }
        assert!(p.lambda.abs() < 1e-10);
    }

    #[test]
    fn half_order_first_eigenvalue() {
        let beta1 = 1.430_296_653_124_202_7;
        let coarse = angular_spectrum(0.5, 256, 1.0, 2).unwrap()[1].lambda;
        let fine = angular_spectrum(0.5, 512, 1.0, 2).unwrap()[1].lambda;
        let extrapolated = (4.0 * fine - coarse) / 3.0;
        assert!((extrapolated - beta1 * beta1).abs() < 1e-4 * beta1 * beta1);
    }

    #[test]
    fn ground_state_converges_to_zero() {
        for s in [0.4, 0.75] {
            let mut prev = f64::INFINITY;
            for n in [64, 128, 256, 512] {
                let l0 = angular_spectrum(s, n, 2.0, 1).unwrap()[0].lambda.abs();
                assert!(l0 <= prev * 1.01, "s={s} n={n}: {l0} vs {prev}");
                assert!(l0 * n as f64 <= 1.0, "s={s} n={n}: {l0}");
                prev = l0;
            }
        }
    }

    #[test]
    fn beta_from_lambda_values() {
        assert_eq!(beta_from_lambda(0.0, 0.3).unwrap(), 0.0);
        assert!((beta_from_lambda(0.0, 0.8).unwrap() - 0.6).abs() < 1e-15);
        assert!((beta_from_lambda(2.0, 0.5).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((beta_from_lambda(-1e-13, 0.5).unwrap()).abs() < 1e-6);
        assert!(matches!(beta_from_lambda(-0.5, 0.5), Err(Error::Domain(_))));
        for s in [0.2, 0.7] {
            let b = 1.37;
            assert!((beta_from_lambda(lambda_from_beta(b, s), s).unwrap() - b).abs() < 1e-13);
        }
    }

    #[test]
    fn tridiagonal_solver_with_pivoting() {
        let dl = [3.0, 1.0, 4.0];
        let d = [1e-14, 2.0, 1.0, 5.0];
        let du = [1.0, 7.0, 2.0];
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let b: Vec<f64> = (0..4)
            .map(|i| {
                let mut v = d[i] * x_true[i];
                if i > 0 {
                    v += dl[i - 1] * x_true[i - 1];
                }
                if i < 3 {
                    v += du[i] * x_true[i + 1];
                }
                v
            })
            .collect();
        let x = solve_tridiagonal(&dl, &d, &du, &b).unwrap();
        for (a, e) in x.iter().zip(x_true) {
            assert!((a - e).abs() < 1e-12);
        }
    }
}
