//! Galerkin minimization of `E(u) = D(u, u)/2 - int f u` on `(0, 1)` with
//!
//! ```text
//! D(u, v) = c_{1,s}/2 int int (u(x) - u(y)) (v(x) - v(y)) |x - y|^{-1-2s} dx dy
//! ```
//!
//! over continuous piecewise-linear functions: free (Neumann) or with
//! `u(0) = u(1) = 0` (Dirichlet, only meaningful for `s > 1/2`).

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::{assemble_pairs, load_vector, mass_matrix, FlatKernel};
use crate::mesh::GradedMesh;
use crate::operator::{eval_pv, PVScheme, SampledFunction};
use crate::special::FracOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
}

impl BoundaryCondition {
    /// Default grading exponent for the mesh.
    pub fn default_grading(self) -> f64 {
        match self {
            BoundaryCondition::Neumann => 2.0,
            BoundaryCondition::Dirichlet => 3.0,
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(v: &str) -> Result<Self> {
        match v {
            "neumann" => Ok(BoundaryCondition::Neumann),
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            other => Err(Error::Invalid(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Stiffness `A` (all nodes), mass `M` and the hat moments `int phi_i`.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub s: f64,
    pub mesh: GradedMesh,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub moments: Vec<f64>,
}

impl GalerkinSystem {
    /// `u^T A u`, i.e. `D(u_h, u_h)` for the nodal vector `u`.
    pub fn energy_form(&self, u: &[f64]) -> f64 {
        let v = DVector::from_column_slice(u);
        v.dot(&(&self.stiffness * &v))
    }
}

pub fn assemble(mesh: &GradedMesh, s: f64) -> Result<GalerkinSystem> {
    let order = FracOrder::new(s)?;
    let b = assemble_pairs(mesh.nodes(), &FlatKernel { s })?;
    let stiffness = b * (0.5 * order.c1s());
    let mass = mass_matrix(mesh.nodes(), false);
    let moments = load_vector(mesh.nodes(), |_| 1.0, false);
    Ok(GalerkinSystem { s, mesh: mesh.clone(), stiffness, mass, moments })
}

/// Nodal solution together with its bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub s: f64,
    pub bc: BoundaryCondition,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Mean of `f` removed before a Neumann solve (zero for Dirichlet).
    pub mean_correction: f64,
    /// `D(u_h, u_h)/2 - int f u_h`.
    pub energy: f64,
    /// `|u_h - I u_{2h}|` at the nodes, when a nested coarse solve was run.
    pub error_profile: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl Solution {
    pub fn mesh(&self) -> GradedMesh {
        GradedMesh::from_nodes(self.nodes.clone()).expect("solution nodes are a valid mesh")
    }

    /// Largest entry of the error profile, if present.
    pub fn error_estimate(&self) -> Option<f64> {
        self.error_profile.as_ref().map(|p| p.iter().copied().fold(0.0, f64::max))
    }

    /// Compares with the solution on the nested mesh with half the elements.
    pub fn attach_error_estimate(&mut self, coarse: &Solution) {
        let cm = coarse.mesh();
        let profile = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, &u)| (u - cm.interpolate(&coarse.values, x)).abs())
            .collect();
        self.error_profile = Some(profile);
    }

    /// `u / delta^{2s-1}` with `delta = min(x, 1 - x)`, `NaN` at the endpoints.
    pub fn boundary_quotient(&self) -> Vec<f64> {
        let p = 2.0 * self.s - 1.0;
        self.nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, &u)| {
                let d = x.min(1.0 - x);
                if d > 0.0 {
                    u / d.powf(p)
                } else {
                    f64::NAN
                }
            })
            .collect()
    }
}

fn energy(sys: &GalerkinSystem, u: &[f64], load: &[f64]) -> f64 {
    0.5 * sys.energy_form(u) - u.iter().zip(load).map(|(a, b)| a * b).sum::<f64>()
}

/// Mean-zero solution of `A u = b` through the bordered system with the constraint `m^T u = 0`.
pub fn solve_neumann_system(sys: &GalerkinSystem, load: &[f64]) -> Result<Solution> {
    let n = sys.moments.len();
    let area: f64 = sys.moments.iter().sum();
    let mean = load.iter().sum::<f64>() / area;
    // f - mean has load b - mean * m
    let b: Vec<f64> = load.iter().zip(&sys.moments).map(|(b, m)| b - mean * m).collect();
    let mut warnings = Vec::new();
    if mean.abs() > 1e-8 {
        warnings.push(format!("load projected to mean zero; removed mean {mean:e}"));
    }
    let mut k = DMatrix::zeros(n + 1, n + 1);
    k.view_mut((0, 0), (n, n)).copy_from(&sys.stiffness);
    for i in 0..n {
        k[(i, n)] = sys.moments[i];
        k[(n, i)] = sys.moments[i];
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs.rows_mut(0, n).copy_from_slice(&b);
    let x = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("bordered Neumann system".into()))?;
    let values: Vec<f64> = x.rows(0, n).iter().copied().collect();
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::Singular("bordered Neumann system produced non-finite values".into()));
    }
    let energy = energy(sys, &values, &b);
    Ok(Solution {
        s: sys.s,
        bc: BoundaryCondition::Neumann,
        nodes: sys.mesh.nodes().to_vec(),
        values,
        mean_correction: mean,
        energy,
        error_profile: None,
        warnings,
    })
}

/// Solution with `u(0) = u(1) = 0` by Cholesky on the interior block.
pub fn solve_dirichlet_system(sys: &GalerkinSystem, load: &[f64]) -> Result<Solution> {
    check_dirichlet_order(sys.s)?;
    let n = sys.moments.len();
    if n < 3 {
        return Err(Error::Invalid("Dirichlet solve needs at least one interior node".into()));
    }
    let m = n - 2;
    let a = sys.stiffness.view((1, 1), (m, m)).into_owned();
    let chol = Cholesky::new(a).ok_or_else(|| {
        Error::Singular("reduced Dirichlet stiffness is not positive definite".into())
    })?;
    let rhs = DVector::from_column_slice(&load[1..n - 1]);
    let x = chol.solve(&rhs);
    let mut values = vec![0.0; n];
    values[1..n - 1].copy_from_slice(x.as_slice());
    let energy = energy(sys, &values, load);
    Ok(Solution {
        s: sys.s,
        bc: BoundaryCondition::Dirichlet,
        nodes: sys.mesh.nodes().to_vec(),
        values,
        mean_correction: 0.0,
        energy,
        error_profile: None,
        warnings: Vec::new(),
    })
}

fn check_dirichlet_order(s: f64) -> Result<()> {
    if s <= 0.5 {
        return Err(Error::Domain(format!(
            "Dirichlet requires s > 1/2 (got s = {s}): for s <= 1/2 boundary values have no trace in H^s"
        )));
    }
    Ok(())
}

pub fn solve_neumann<F: Fn(f64) -> f64 + Sync>(f: F, mesh: &GradedMesh, s: f64) -> Result<Solution> {
    let sys = assemble(mesh, s)?;
    let load = load_vector(mesh.nodes(), f, false);
    solve_neumann_system(&sys, &load)
}

pub fn solve_dirichlet<F: Fn(f64) -> f64 + Sync>(f: F, mesh: &GradedMesh, s: f64) -> Result<Solution> {
    check_dirichlet_order(s)?;
    let sys = assemble(mesh, s)?;
    let load = load_vector(mesh.nodes(), f, false);
    solve_dirichlet_system(&sys, &load)
}

/// Solves on `mesh` and on its nested coarsening and records the difference.
pub fn solve_with_estimate<F: Fn(f64) -> f64 + Sync>(
    bc: BoundaryCondition,
    f: F,
    mesh: &GradedMesh,
    s: f64,
) -> Result<Solution> {
    let run = |m: &GradedMesh| match bc {
        BoundaryCondition::Neumann => solve_neumann(&f, m, s),
        BoundaryCondition::Dirichlet => solve_dirichlet(&f, m, s),
    };
    let mut fine = run(mesh)?;
    if let Some(coarse_mesh) = mesh.coarsened() {
        let coarse = run(&coarse_mesh)?;
        fine.attach_error_estimate(&coarse);
    }
    Ok(fine)
}

/// `(-Delta)^s_{(0,1)} cos(pi x)`: the load whose Neumann solution is `cos(pi x)`.
pub fn manufactured_cos_load(s: f64) -> Result<impl Fn(f64) -> f64 + Sync> {
    FracOrder::new(s)?;
    let u = SampledFunction::cos_pi();
    let scheme = PVScheme::default();
    Ok(move |x: f64| eval_pv(&u, x, s, &scheme).map(|v| v.value).unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use std::f64::consts::PI;

    #[test]
    fn constants_in_kernel() {
        let sys = assemble(&GradedMesh::uniform(2).unwrap(), 0.5).unwrap();
        let ones = DVector::from_element(3, 1.0);
        assert!((&sys.stiffness * ones).amax() < 1e-12);
        let sys = assemble(&GradedMesh::symmetric(40, 2.0).unwrap(), 0.8).unwrap();
        let a = &sys.stiffness;
        assert_eq!(a, &a.transpose());
    }

    #[test]
    fn zero_load_gives_zero() {
        let mesh = GradedMesh::symmetric(16, 2.0).unwrap();
        let u = solve_neumann(|_| 0.0, &mesh, 0.4).unwrap();
        assert!(u.values.iter().all(|v| *v == 0.0));
        let u = solve_dirichlet(|_| 0.0, &mesh, 0.7).unwrap();
        assert!(u.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dirichlet_rejects_small_order() {
        let mesh = GradedMesh::uniform(8).unwrap();
        let err = solve_dirichlet(|_| 1.0, &mesh, 0.4).unwrap_err();
        assert!(err.to_string().contains("Dirichlet requires s > 1/2"));
        assert!(err.is_validation());
    }

    #[test]
    fn dirichlet_is_coercive_and_positive() {
        let mesh = GradedMesh::symmetric(32, 3.0).unwrap();
        let sys = assemble(&mesh, 0.75).unwrap();
        let red = sys.stiffness.view((1, 1), (31, 31)).into_owned();
        let ev = SymmetricEigen::new(red).eigenvalues;
        assert!(ev.min() > 0.0);
        let load = load_vector(mesh.nodes(), |_| 1.0, false);
        let u = solve_dirichlet_system(&sys, &load).unwrap();
        assert!(u.values[1..32].iter().all(|v| *v > 0.0));
    }

    #[test]
    fn neumann_solution_minimizes_energy() {
        let mesh = GradedMesh::symmetric(24, 2.0).unwrap();
        let sys = assemble(&mesh, 0.6).unwrap();
        let load = load_vector(mesh.nodes(), |x| (PI * x).cos(), false);
        let u = solve_neumann_system(&sys, &load).unwrap();
        let mean: f64 = u.values.iter().zip(&sys.moments).map(|(a, b)| a * b).sum();
        assert!(mean.abs() < 1e-13);
        let mut seed = 17u64;
        for _ in 0..10 {
            let p: Vec<f64> = (0..25)
                .map(|_| {
                    seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1);
                    ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
                })
                .collect();
            let v: Vec<f64> = u.values.iter().zip(&p).map(|(a, b)| a + 1e-3 * b).collect();
            assert!(energy(&sys, &v, &load) > u.energy);
        }
    }

    #[test]
    fn manufactured_neumann_solution_converges() {
        let s = 0.6;
        let f = manufactured_cos_load(s).unwrap();
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let mesh = GradedMesh::symmetric(n, 2.0).unwrap();
            let u = solve_neumann(&f, &mesh, s).unwrap();
            assert!(u.mean_correction.abs() < 1e-6, "{}", u.mean_correction);
            let err = mesh
                .nodes()
                .iter()
                .zip(&u.values)
                .map(|(x, v)| (v - (PI * x).cos()).abs())
                .fold(0.0, f64::max);
            assert!(err < prev, "n={n}: {err} vs {prev}");
            prev = err;
        }
        assert!(prev < 2e-2);
    }
}
