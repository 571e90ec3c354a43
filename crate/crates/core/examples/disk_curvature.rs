//! Radial Dirichlet problem on the unit disk with f = 1 and the boundary
//! behaviour of psi = u / (1 - r)^{2s-1}.
//!
//! Two independent numbers are printed for psi'(1)/psi(1): the Galerkin
//! estimate under refinement, and the value forced by cancelling the
//! `log delta` term of (-Delta)^s[delta^{2s-1}(1 + b delta)].

use regfrac::disk::{
    apply_regional_radial, check_curvature_identity, curvature_log_balance, richardson, solve_disk, CURVATURE_WINDOW,
};
use regfrac::exponents::critical_exponents;
use regfrac::mesh::GradedMesh;

fn main() -> regfrac::Result<()> {
    for s in [0.75, 0.9] {
        let beta1 = critical_exponents(s, 1, 1e-14)?.beta[1];
        let mut prev: Option<f64> = None;
        println!("s = {s}");
        for n in [128, 256, 512] {
            let sol = solve_disk(|_| 1.0, &GradedMesh::toward_right(n, 3.0)?, s)?;
            let rep = check_curvature_identity(&sol, beta1, CURVATURE_WINDOW)?;
            let rich = prev.map(|p| format!(", Richardson {:.4}", richardson(p, rep.ratio))).unwrap_or_default();
            println!(
                "  n = {n:>3}: psi(1) {:.6}, psi'(1) {:+.5}, ratio {:+.4}{rich}, dispersion {:.1e}",
                rep.psi1, rep.dpsi1, rep.ratio, rep.dispersion
            );
            prev = Some(rep.ratio);
        }

        let p = 2.0 * s - 1.0;
        let v = |b: f64| move |r: f64| if r < 1.0 { (1.0 - r).powf(p) * (1.0 + b * (1.0 - r)) } else { 0.0 };
        let slope = |b: f64| -> regfrac::Result<f64> {
            let (d1, d2) = (1e-4, 1e-5);
            let f1 = apply_regional_radial(v(b), 1.0 - d1, s)?;
            let f2 = apply_regional_radial(v(b), 1.0 - d2, s)?;
            Ok((f2 - f1) / (d2 / d1).ln())
        };
        let (a0, a1) = (slope(0.0)?, slope(1.0)? - slope(0.0)?);
        println!(
            "  log-balance: b = {:.4} from quadrature, {:.4} closed form",
            -a0 / a1,
            curvature_log_balance(s)?
        );
    }
    Ok(())
}
