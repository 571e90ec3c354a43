//! Piecewise-linear Galerkin matrices of the singular double integral
//!
//! ```text
//! B_ij = int int (phi_i(x) - phi_i(y)) (phi_j(x) - phi_j(y)) S(x, y) |x - y|^{-1-2s} dx dy
//! ```
//!
//! over `[x_0, x_n]^2`, shared by the interval and the radial disk problems.
//! Coincident and touching element pairs go through Duffy-type maps that
//! turn the singularity into Gauss-Jacobi weights; separated pairs use
//! tensor Gauss rules whose order follows the pair's relative distance.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, gauss_power, Rule};

/// Kernel `S(x, y) |x - y|^{-1-2s}` with `S` symmetric and bounded near the diagonal.
pub trait PairKernel: Sync {
    fn s(&self) -> f64;
    fn smooth(&self, x: f64, y: f64) -> f64;
    /// Rule sizes for coincident and touching pairs; a constant `S` needs very few.
    fn singular_points(&self) -> usize {
        10
    }
}

/// `S = 1`: the one-dimensional interval kernel.
#[derive(Debug, Clone, Copy)]
pub struct FlatKernel {
    pub s: f64,
}

impl PairKernel for FlatKernel {
    fn s(&self) -> f64 {
        self.s
    }

    fn smooth(&self, _x: f64, _y: f64) -> f64 {
        1.0
    }

    fn singular_points(&self) -> usize {
        3
    }
}

struct Rules {
    same_t: Rule,
    same_v: Rule,
    touch_t: Rule,
    touch_u: Rule,
    legendre: Vec<Rule>,
}

const MAX_TENSOR: usize = 24;

impl Rules {
    fn new(s: f64, m: usize) -> Result<Self> {
        Ok(Rules {
            same_t: gauss_power(m, 2.0 - 2.0 * s)?,
            same_v: gauss_power(m, 1.0 - 2.0 * s)?,
            touch_t: gauss_power(m, 2.0 - 2.0 * s)?,
            touch_u: gauss_legendre(2 * m + 4).to_unit(),
            legendre: (0..=MAX_TENSOR).map(|n| gauss_legendre(n.max(1)).to_unit()).collect(),
        })
    }

    /// Gauss order for two intervals at distance `gap` with the larger width `size`.
    fn tensor_order(&self, gap: f64, size: f64) -> usize {
        let eta = gap / size;
        let rho = 1.0 + 2.0 * eta + 2.0 * (eta * (1.0 + eta)).sqrt();
        let n = (14.0 * std::f64::consts::LN_10 / (2.0 * rho.ln())).ceil() as usize + 1;
        n.clamp(3, MAX_TENSOR)
    }
}

#[inline]
fn hat(nodes: &[f64], k: usize, x: f64) -> f64 {
    let n = nodes.len() - 1;
    if k > 0 && x >= nodes[k - 1] && x <= nodes[k] {
        return (x - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
    }
    if k < n && x >= nodes[k] && x <= nodes[k + 1] {
        return (nodes[k + 1] - x) / (nodes[k + 1] - nodes[k]);
    }
    0.0
}

/// Adds the contribution of the ordered element pair `(e, f)`, `e <= f`.
fn pair_contribution<K: PairKernel>(
    nodes: &[f64],
    kernel: &K,
    rules: &Rules,
    e: usize,
    f: usize,
    out: &mut Vec<(usize, usize, f64)>,
) {
    let s = kernel.s();
    let p = -1.0 - 2.0 * s;
    let mut dofs = [e, e + 1, f, f + 1];
    let nd = if f == e {
        2
    } else if f == e + 1 {
        dofs[2] = f + 1;
        3
    } else {
        4
    };
    let dofs = &dofs[..nd];
    let mut local = [[0.0f64; 4]; 4];
    let add = |x: f64, y: f64, w: f64, local: &mut [[f64; 4]; 4]| {
        let k = w * kernel.smooth(x, y);
        let mut d = [0.0; 4];
        for (a, &i) in dofs.iter().enumerate() {
            d[a] = hat(nodes, i, x) - hat(nodes, i, y);
        }
        for a in 0..nd {
            for b in 0..=a {
                local[a][b] += k * d[a] * d[b];
            }
        }
    };

    let (a0, a1) = (nodes[e], nodes[e + 1]);
    let (b0, b1) = (nodes[f], nodes[f + 1]);
    let (h1, h2) = (a1 - a0, b1 - b0);
    if f == e {
        // triangle y < x: x = a0 + h t, y = a0 + h t (1 - v); |x - y| = h t v.
        // weights carry t^{2-2s} v^{1-2s}; factor 2 for the mirrored triangle
        for (t, wt) in rules.same_t.nodes.iter().zip(&rules.same_t.weights) {
            for (v, wv) in rules.same_v.nodes.iter().zip(&rules.same_v.weights) {
                let x = a0 + h1 * t;
                let y = a0 + h1 * t * (1.0 - v);
                let r = h1 * t * v;
                let jac = h1 * h1 * t;
                let w = 2.0 * wt * wv * jac * r.powf(p) / (t.powf(2.0 - 2.0 * s) * v.powf(1.0 - 2.0 * s));
                add(x, y, w, &mut local);
            }
        }
    } else if f == e + 1 {
        // x = a1 - h1 a, y = a1 + h2 b, split along a = b into two Duffy triangles
        for (t, wt) in rules.touch_t.nodes.iter().zip(&rules.touch_t.weights) {
            for (u, wu) in rules.touch_u.nodes.iter().zip(&rules.touch_u.weights) {
                let jac = h1 * h2 * t;
                let tw = t.powf(2.0 - 2.0 * s);
                // a = t, b = t u
                let (x, y) = (a1 - h1 * t, a1 + h2 * t * u);
                let w = 2.0 * wt * wu * jac * (y - x).powf(p) / tw;
                add(x, y, w, &mut local);
                // b = t, a = t u
                let (x, y) = (a1 - h1 * t * u, a1 + h2 * t);
                let w = 2.0 * wt * wu * jac * (y - x).powf(p) / tw;
                add(x, y, w, &mut local);
            }
        }
    } else {
        let gap = b0 - a1;
        let (ne, nf) = (rules.tensor_order(gap, h1), rules.tensor_order(gap, h2));
        let (re, rf) = (&rules.legendre[ne], &rules.legendre[nf]);
        for (xi, wx) in re.nodes.iter().zip(&re.weights) {
            let x = a0 + h1 * xi;
            for (yi, wy) in rf.nodes.iter().zip(&rf.weights) {
                let y = b0 + h2 * yi;
                let w = 2.0 * wx * wy * h1 * h2 * (y - x).powf(p);
                add(x, y, w, &mut local);
            }
        }
    }
    for a in 0..nd {
        for b in 0..=a {
            let v = local[a][b];
            out.push((dofs[a], dofs[b], v));
        }
    }
}

/// Full matrix `B` over all nodes (no boundary conditions applied).
pub fn assemble_pairs<K: PairKernel>(nodes: &[f64], kernel: &K) -> Result<DMatrix<f64>> {
    let n = nodes.len();
    if n < 2 {
        return Err(Error::Invalid("need at least one element".into()));
    }
    let rules = Rules::new(kernel.s(), kernel.singular_points())?;
    let elements = n - 1;
    // per-row contributions in parallel, summed in a fixed order so the result is reproducible
    let blocks: Vec<Vec<(usize, usize, f64)>> = (0..elements)
        .into_par_iter()
        .map(|e| {
            let mut acc = Vec::with_capacity(10 * (elements - e));
            for f in e..elements {
                pair_contribution(nodes, kernel, &rules, e, f, &mut acc);
            }
            acc
        })
        .collect();
    let mut b = DMatrix::<f64>::zeros(n, n);
    for (i, j, v) in blocks.into_iter().flatten() {
        b[(i, j)] += v;
        if i != j {
            b[(j, i)] += v;
        }
    }

    let scale = b.amax();
    if !scale.is_finite() {
        return Err(Error::Singular("non-finite stiffness entry".into()));
    }
    for i in 0..n {
        let row: f64 = b.row(i).sum();
        if row.abs() > 1e-10 * scale {
            return Err(Error::Singular(format!(
                "row {i} of the stiffness does not annihilate constants: {row:e}"
            )));
        }
    }
    Ok(b)
}

/// Consistent P1 mass matrix for the weight `w(x)` (`1` or `x`), exact for both.
pub fn mass_matrix(nodes: &[f64], radial: bool) -> DMatrix<f64> {
    let n = nodes.len();
    let mut m = DMatrix::zeros(n, n);
    let g = gauss_legendre(3).to_unit();
    for e in 0..n - 1 {
        let (a, h) = (nodes[e], nodes[e + 1] - nodes[e]);
        for (t, w) in g.nodes.iter().zip(&g.weights) {
            let x = a + h * t;
            let wt = w * h * if radial { x } else { 1.0 };
            let phi = [1.0 - t, *t];
            for i in 0..2 {
                for j in 0..2 {
                    m[(e + i, e + j)] += wt * phi[i] * phi[j];
                }
            }
        }
    }
    m
}

/// `int f phi_i w(x) dx` with a 6-point rule per element.
pub fn load_vector<F: Fn(f64) -> f64 + Sync>(nodes: &[f64], f: F, radial: bool) -> Vec<f64> {
    let n = nodes.len();
    let g = gauss_legendre(6).to_unit();
    let per_element: Vec<[f64; 2]> = (0..n - 1)
        .into_par_iter()
        .map(|e| {
            let (a, h) = (nodes[e], nodes[e + 1] - nodes[e]);
            let mut out = [0.0; 2];
            for (t, w) in g.nodes.iter().zip(&g.weights) {
                let x = a + h * t;
                let v = w * h * f(x) * if radial { x } else { 1.0 };
                out[0] += v * (1.0 - t);
                out[1] += v * t;
            }
            out
        })
        .collect();
    let mut b = vec![0.0; n];
    for (e, v) in per_element.iter().enumerate() {
        b[e] += v[0];
        b[e + 1] += v[1];
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_elements_at_half_order() {
        let nodes = [0.0, 0.5, 1.0];
        let b = assemble_pairs(&nodes, &FlatKernel { s: 0.5 }).unwrap();
        for i in 0..3 {
            assert!(b.row(i).sum().abs() < 1e-12);
            for j in 0..3 {
                assert_eq!(b[(i, j)], b[(j, i)]);
            }
        }
        assert!(b[(0, 0)] > 0.0 && b[(1, 1)] > 0.0 && b[(0, 2)] < 0.0);
    }

    #[test]
    fn interpolant_energy_matches_oracle() {
        // (1/2) int int (u_h(x) - u_h(y))^2 |x - y|^{-1-2s} for the interpolant of
        // cos(pi x) on 4 uniform elements, frozen from a 30-digit double quadrature
        let nodes = [0.0, 0.25, 0.5, 0.75, 1.0];
        let u: Vec<f64> = nodes.iter().map(|x: &f64| (std::f64::consts::PI * x).cos()).collect();
        for (s, want) in [(0.3, 1.621_215_803_015_971_7), (0.75, 6.851_750_838_538_12)] {
            let b = assemble_pairs(&nodes, &FlatKernel { s }).unwrap();
            let mut e = 0.0;
            for i in 0..5 {
                for j in 0..5 {
                    e += 0.5 * u[i] * b[(i, j)] * u[j];
                }
            }
            assert!((e - want).abs() < 1e-9 * want, "s={s}: {e} vs {want}");
        }
    }

    #[test]
    fn mass_and_load() {
        let nodes = [0.0, 0.3, 1.0];
        let m = mass_matrix(&nodes, false);
        assert!((m.sum() - 1.0).abs() < 1e-15);
        let mr = mass_matrix(&nodes, true);
        assert!((mr.sum() - 0.5).abs() < 1e-15);
        let b = load_vector(&nodes, |x| x * x, false);
        assert!((b.iter().sum::<f64>() - 1.0 / 3.0).abs() < 1e-15);
    }
}
