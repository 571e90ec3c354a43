//! The angular eigenproblem on (0, pi) with weight sin^{1-2s} and its Robin
//! condition at 0. Eigenvalues map to exponents via
//! beta = (2s-1)/2 + sqrt(lambda + ((2s-1)/2)^2), which should reproduce the
//! roots of the exponent equation.

use regfrac::angular::{angular_spectrum, beta_from_lambda};
use regfrac::exponents::critical_exponents;

fn main() -> regfrac::Result<()> {
    for s in [0.3, 0.5, 0.75] {
        let roots = critical_exponents(s, 2, 1e-14)?;
        println!("s = {s}");
        for n in [64, 128, 256, 512] {
            let pairs = angular_spectrum(s, n, 2.0, 3)?;
            let betas: Vec<String> = pairs
                .iter()
                .map(|p| format!("{:.7}", beta_from_lambda(p.lambda, s).unwrap_or(f64::NAN)))
                .collect();
            println!("  n = {n:>3}: lambda_0 = {:+.2e}, beta = [{}]", pairs[0].lambda, betas.join(", "));
        }
        println!("  roots:   beta = [{:.7}, {:.7}, {:.7}]", roots.beta[0], roots.beta[1], roots.beta[2]);
    }
    Ok(())
}
