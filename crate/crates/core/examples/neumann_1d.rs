//! Neumann minimizer of D(u,u)/2 - int f u on (0, 1) for f = cos(pi x).
//!
//! Prints the fitted expansion u ~ c0 + a0 x^{2s-1} + a1 x^{beta_1} near x = 0
//! under refinement (a0 should vanish) and the growth exponent of the
//! remainder, which should match beta_1 = 2s + alpha_s.

use regfrac::expansion::{estimate_boundary_holder, fit_boundary_expansion};
use regfrac::exponents::critical_exponents;
use regfrac::mesh::GradedMesh;
use regfrac::solver::{solve_with_estimate, BoundaryCondition};
use regfrac::special::cos_pi;

fn main() -> regfrac::Result<()> {
    let s = 0.5;
    let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
    println!("s = {s}, beta_1 = {beta1:.6}");
    for n in [64, 128, 256, 512] {
        let mesh = GradedMesh::symmetric(n, 2.0)?;
        let sol = solve_with_estimate(BoundaryCondition::Neumann, cos_pi, &mesh, s)?;
        let fit = fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, 5.12 / n as f64)?;
        println!(
            "n = {n:>3}: energy {:+.10}, c0 {:+.6}, a0 {:+.2e}, a1 {:+.4}, error est. {:.1e}",
            sol.energy,
            fit.c0,
            fit.a0,
            fit.a1,
            sol.error_estimate().unwrap_or(f64::NAN)
        );
        if n == 512 {
            let wide = fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, 0.02)?;
            let h = estimate_boundary_holder(&sol.nodes, &sol.values, sol.error_profile.as_deref(), &wide)?;
            println!("remainder slopes per dyadic window: {:.3?}", h.slopes);
            println!("median {:.4} ({:?})", h.exponent, h.status);
        }
    }
    Ok(())
}
