//! Dirichlet minimizer on (0, 1) for f = 1: u vanishes like x^{2s-1}, so the
//! quotient u / x^{2s-1} has a positive limit at the boundary.

use regfrac::expansion::fit_boundary_expansion;
use regfrac::exponents::critical_exponents;
use regfrac::mesh::GradedMesh;
use regfrac::solver::solve_dirichlet;

fn main() -> regfrac::Result<()> {
    let s = 0.75;
    let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
    for n in [128, 256, 512] {
        let sol = solve_dirichlet(|_| 1.0, &GradedMesh::symmetric(n, 3.0)?, s)?;
        let fit = fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, 0.2)?;
        let q = sol.boundary_quotient();
        println!(
            "n = {n:>3}: u(1/2) = {:.8}, c0 = {:+.1e}, a0 = {:.6}, quotient at nodes 1..4: {:.5?}",
            sol.values[n / 2],
            fit.c0,
            fit.a0,
            &q[1..5]
        );
    }
    // s <= 1/2 has no Dirichlet problem
    let err = solve_dirichlet(|_| 1.0, &GradedMesh::uniform(16)?, 0.4).unwrap_err();
    println!("s = 0.4: {err}");
    Ok(())
}
