//! Critical exponents beta_k(s) from the algebraic equation h1 = h2, checked
//! against the half-line coefficient C_reg and the interval bounds beta_k in (k + beta_0, k + s).
//!
//!     cargo run --release --example exponents

use regfrac::exponents::{critical_exponents, exponent_atlas, verify_root};

fn main() -> regfrac::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>9}", "s", "beta_0", "beta_1", "beta_2", "beta_3", "alpha_s");
    for t in exponent_atlas(0.1, 0.9, 0.1, 3, 1e-13)? {
        println!(
            "{:>5.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>9.5}",
            t.s, t.beta[0], t.beta[1], t.beta[2], t.beta[3], t.alpha_s
        );
        assert!(t.violations().is_empty(), "{:?}", t.violations());
    }

    // at s = 1/2 the equation reduces to tan(pi beta) = pi beta
    let half = critical_exponents(0.5, 3, 1e-14)?;
    for (k, b) in half.beta.iter().enumerate().skip(1) {
        let x = std::f64::consts::PI * b;
        println!("s = 1/2, k = {k}: beta = {b:.12}, tan(pi beta) - pi beta = {:.1e}", x.tan() - x);
    }

    let r = verify_root(half.beta[1], 0.5, 1e-10);
    println!("\nroot report for beta_1(1/2): {}", serde_json::to_string(&r).unwrap());
    let off = verify_root(1.2, 0.5, 1e-10);
    println!("and for beta = 1.2 (not a root): is_root = {}", off.is_root);
    Ok(())
}
