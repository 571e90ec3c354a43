//! The acceptance checks as library functions, shared by `regfrac selftest`
//! and the integration tests.

use std::time::Instant;

use serde::Serialize;

use crate::angular::{angular_spectrum, beta_from_lambda};
use crate::disk::{check_curvature_identity, curvature_log_balance, richardson, solve_disk, CURVATURE_WINDOW};
use crate::error::Result;
use crate::expansion::{estimate_boundary_holder, fit_boundary_expansion, HolderStatus};
use crate::exponents::critical_exponents;
use crate::mesh::GradedMesh;
use crate::operator::{eval_boundary_formula, eval_pv, PVScheme, SampledFunction};
use crate::solver::{manufactured_cos_load, solve_dirichlet, solve_neumann, solve_with_estimate, BoundaryCondition};
use crate::special::{regional_power_coeff, FracOrder};

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {} ({:.1} s): {}", self.id, self.title, self.seconds, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Analytic identities and root finding, seconds.
    Quick,
    /// Everything, including the refinement studies.
    Full,
}

pub const SWEEP: [f64; 7] = [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9];

fn run(id: u32, title: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Criterion {
    let t = Instant::now();
    let (passed, detail) = match body() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion { id, title, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

/// Root of `tan x = x` in `(a, b)` by plain bisection.
fn tan_root(a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a + 1e-12, b - 1e-12);
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

pub fn exponents_at_half() -> Criterion {
    use std::f64::consts::PI;
    run(1, "exponent equation at s = 1/2", || {
        let t = critical_exponents(0.5, 2, 1e-14)?;
        let b1 = tan_root(PI, 1.5 * PI) / PI;
        let b2 = tan_root(2.0 * PI, 2.5 * PI) / PI;
        let (e1, e2) = ((t.beta[1] - b1).abs(), (t.beta[2] - b2).abs());
        let printed = (t.beta[1] - 1.430_296_7).abs();
        Ok((
            e1 < 1e-6 && e2 < 1e-6 && printed < 1e-6,
            format!("beta1 = {:.10} (|diff| {e1:.1e}), beta2 = {:.10} (|diff| {e2:.1e})", t.beta[1], t.beta[2]),
        ))
    })
}

pub fn exponent_intervals() -> Criterion {
    run(2, "exponent interval structure", || {
        let mut bad = Vec::new();
        for s in SWEEP {
            let t = critical_exponents(s, 5, 1e-13)?;
            bad.extend(t.violations().into_iter().map(|v| format!("s={s}: {v}")));
        }
        let n = bad.len();
        Ok((n == 0, if n == 0 { format!("{} orders, K = 5, no violations", SWEEP.len()) } else { bad.join("; ") }))
    })
}

pub fn kernel_identities() -> Criterion {
    run(3, "kernel identities", || {
        let mut worst = [0.0f64; 3];
        for s in SWEEP {
            worst[0] = worst[0].max(regional_power_coeff(0.0, s)?.abs());
            if s > 0.5 {
                worst[1] = worst[1].max(regional_power_coeff(2.0 * s - 1.0, s)?.abs());
            }
            let o = FracOrder::new(s)?;
            worst[2] = worst[2].max((o.c1s() - o.c1s_reflection()).abs());
        }
        Ok((
            worst.iter().all(|w| *w < 1e-12),
            format!("|C_reg(0)| {:.1e}, |C_reg(2s-1)| {:.1e}, c_1s routes {:.1e}", worst[0], worst[1], worst[2]),
        ))
    })
}

pub fn operator_cross_validation() -> Criterion {
    run(4, "p.v. quadrature vs closed-form power coefficient", || {
        let mut worst: f64 = 0.0;
        for s in [0.3, 0.6, 0.75] {
            for beta in [s, 1.0, 2.0 * s - 1.0 + 0.3] {
                let u = SampledFunction::power(beta)?;
                let v = eval_pv(&u, 1.0, s, &PVScheme::default())?.value;
                let want = regional_power_coeff(beta, s)?;
                worst = worst.max((v - want).abs() / want.abs());
            }
        }
        Ok((worst < 1e-5, format!("max relative error {worst:.2e} over 9 cases")))
    })
}

pub fn angular_eigenproblem() -> Criterion {
    run(5, "angular eigenproblem", || {
        let mut notes = Vec::new();
        let mut ok = true;
        for s in [0.4, 0.5, 0.6, 0.75] {
            let pairs = angular_spectrum(s, 512, 2.0, 2)?;
            let (l0, l1) = (pairs[0].lambda, pairs[1].lambda);
            let b = beta_from_lambda(l1, s)?;
            let root = critical_exponents(s, 1, 1e-14)?.beta[1];
            let rel = (b - root).abs() / root;
            ok &= l0.abs() <= 1e-3 * l1 && rel < 1e-3;
            notes.push(format!("s={s}: |l0|/l1 {:.1e}, beta1 rel {rel:.1e}", l0.abs() / l1));
        }
        let coarse = angular_spectrum(0.5, 256, 1.0, 2)?[1].lambda;
        let fine = angular_spectrum(0.5, 512, 1.0, 2)?[1].lambda;
        let extrapolated = (4.0 * fine - coarse) / 3.0;
        let b1 = critical_exponents(0.5, 1, 1e-14)?.beta[1];
        let rel = (extrapolated - b1 * b1).abs() / (b1 * b1);
        ok &= rel < 1e-4;
        notes.push(format!("s=1/2 Richardson lambda1 rel {rel:.1e}"));
        Ok((ok, notes.join("; ")))
    })
}

/// `v0 + c x^{2-2s} + d x` through three points; returns `v0`.
fn extrapolate_to_zero(xs: [f64; 3], vs: [f64; 3], s: f64) -> f64 {
    let p = 2.0 - 2.0 * s;
    let a = nalgebra::Matrix3::from_fn(|i, j| match j {
        0 => 1.0,
        1 => xs[i].powf(p),
        _ => xs[i],
    });
    let sol = a.lu().solve(&nalgebra::Vector3::from_column_slice(&vs));
    sol.map(|v| v[0]).unwrap_or(f64::NAN)
}

pub fn boundary_formula() -> Criterion {
    run(6, "boundary formula vs p.v.", || {
        let u = SampledFunction::cos_pi();
        let mut worst: f64 = 0.0;
        let mut end_err: f64 = 0.0;
        for s in [0.6, 0.75] {
            for i in 1..=9 {
                let x = i as f64 / 10.0;
                let a = eval_boundary_formula(&u, x, s)?.value;
                let b = eval_pv(&u, x, s, &PVScheme::default())?.value;
                worst = worst.max((a - b).abs() / (1.0 + b.abs()));
            }
            let xs = [1e-4, 1e-3, 1e-2];
            let mut vs = [0.0; 3];
            for (v, x) in vs.iter_mut().zip(xs) {
                *v = eval_pv(&u, x, s, &PVScheme::default())?.value;
            }
            let at0 = eval_boundary_formula(&u, 0.0, s)?.value;
            let extrap = extrapolate_to_zero(xs, vs, s);
            end_err = end_err.max((at0 - extrap).abs() / (1.0 + at0.abs()));
        }
        Ok((
            worst < 1e-4 && end_err < 1e-3,
            format!("interior max {worst:.1e}, endpoint vs extrapolation {end_err:.1e}"),
        ))
    })
}

/// Fit window for the `a0` refinement study: a fixed number of boundary cells.
pub fn neumann_fit_window(n: usize) -> f64 {
    5.12 / n as f64
}

pub fn neumann_structure() -> Criterion {
    run(7, "Neumann boundary structure", || {
        let mut ok = true;
        let mut notes = Vec::new();
        for s in [0.5, 0.75] {
            let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
            let load = manufactured_cos_load(s)?;
            let (mut a0s, mut errs) = (Vec::new(), Vec::new());
            for n in [128, 256, 512] {
                let mesh = GradedMesh::symmetric(n, BoundaryCondition::Neumann.default_grading())?;
                let sol = solve_neumann(crate::special::cos_pi, &mesh, s)?;
                let fit = fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, neumann_fit_window(n))?;
                a0s.push(fit.a0.abs());
                let man = solve_neumann(&load, &mesh, s)?;
                let err = man
                    .values
                    .iter()
                    .zip(&man.nodes)
                    .map(|(u, x)| (u - crate::special::cos_pi(*x)).abs())
                    .fold(0.0, f64::max);
                errs.push(err);
            }
            let ratios = [a0s[0] / a0s[1], a0s[1] / a0s[2]];
            ok &= ratios.iter().all(|r| *r >= 1.8) && errs[1] < errs[0] && errs[2] < errs[1];
            notes.push(format!(
                "s={s}: |a0| {:.2e} {:.2e} {:.2e} (ratios {:.2}, {:.2}), max err {:.1e} {:.1e} {:.1e}",
                a0s[0], a0s[1], a0s[2], ratios[0], ratios[1], errs[0], errs[1], errs[2]
            ));
        }
        Ok((ok, notes.join("; ")))
    })
}

pub fn dirichlet_structure() -> Criterion {
    run(8, "Dirichlet boundary structure", || {
        let s = 0.75;
        let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
        let mu = BoundaryCondition::Dirichlet.default_grading();
        let mut q = Vec::new();
        let mut c0 = f64::NAN;
        for n in [256, 512] {
            let sol = solve_dirichlet(|_| 1.0, &GradedMesh::symmetric(n, mu)?, s)?;
            q.push(sol.boundary_quotient()[1]);
            if n == 512 {
                c0 = fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, 0.2)?.c0;
            }
        }
        let var = (q[1] - q[0]).abs() / q[1].abs();
        Ok((
            c0.abs() < 1e-3 && var < 0.05,
            format!("|c0| {:.1e} at n=512; first-node quotient {:.6} -> {:.6} ({var:.1e})", c0.abs(), q[0], q[1]),
        ))
    })
}

pub fn holder_exponent() -> Criterion {
    run(9, "boundary Holder exponent at s = 1/2", || {
        let s = 0.5;
        let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
        let mesh = GradedMesh::symmetric(512, BoundaryCondition::Neumann.default_grading())?;
        let sol = solve_with_estimate(BoundaryCondition::Neumann, crate::special::cos_pi, &mesh, s)?;
        let fit = fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, 0.02)?;
        let est = estimate_boundary_holder(&sol.nodes, &sol.values, sol.error_profile.as_deref(), &fit)?;
        let in_band = est.slopes.iter().all(|g| (g - beta1).abs() <= 0.15);
        let passed = in_band || est.status == HolderStatus::Inconclusive;
        let slopes: Vec<String> = est.slopes.iter().map(|g| format!("{g:.3}")).collect();
        Ok((
            passed,
            format!("slopes [{}] vs {beta1:.4}, median {:.4}, status {:?}", slopes.join(", "), est.exponent, est.status),
        ))
    })
}

pub fn curvature_identity() -> Criterion {
    run(10, "mean-curvature identity on the unit disk", || {
        let mut ok = true;
        let mut notes = Vec::new();
        for s in [0.75, 0.9] {
            let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
            let mut ratios = Vec::new();
            for n in [128, 256, 512] {
                let sol = solve_disk(|_| 1.0, &GradedMesh::toward_right(n, 3.0)?, s)?;
                ratios.push(check_curvature_identity(&sol, beta1, CURVATURE_WINDOW)?.ratio);
            }
            let extrapolated = richardson(ratios[1], ratios[2]);
            let shrinking = (ratios[2] + 1.0).abs() < (ratios[0] + 1.0).abs();
            ok &= (-1.1..=-0.9).contains(&extrapolated) && shrinking;
            notes.push(format!(
                "s={s}: ratio {:.4} {:.4} {:.4}, Richardson {extrapolated:.4} (predicted -1; log balance gives {:.4})",
                ratios[0],
                ratios[1],
                ratios[2],
                -curvature_log_balance(s)?
            ));
        }
        Ok((ok, notes.join("; ")))
    })
}

pub fn run_all(tier: Tier) -> Vec<Criterion> {
    let mut out = vec![exponents_at_half(), exponent_intervals(), kernel_identities(), operator_cross_validation()];
    out.push(boundary_formula());
    if tier == Tier::Full {
        out.push(angular_eigenproblem());
        out.push(neumann_structure());
        out.push(dirichlet_structure());
        out.push(holder_exponent());
        out.push(curvature_identity());
    }
    out.sort_by_key(|c| c.id);
    out
}
