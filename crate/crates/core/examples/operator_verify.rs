//! Principal-value evaluation of the regional operator.

use regfrac::operator::{eval_boundary_formula, eval_power_halfline, eval_pv, PVScheme, SampledFunction};
use regfrac::special::regional_power_coeff;

fn main() -> regfrac::Result<()> {
    let scheme = PVScheme::default();

    println!("half-line powers: quadrature vs C_reg(beta) x^(beta-2s)");
    for (s, beta) in [(0.3, 0.3), (0.6, 1.0), (0.75, 0.8), (0.75, 2.2)] {
        for x in [0.5, 2.0] {
            let q = eval_pv(&SampledFunction::power(beta)?, x, s, &scheme)?;
            let c = eval_power_halfline(beta, x, s)?;
            println!(
                "  s={s:<4} beta={beta:<4} x={x:<3}  {:+.12e}  {:+.12e}  rel {:.1e} (estimate {:.1e})",
                q.value,
                c,
                (q.value - c).abs() / c.abs(),
                q.error
            );
        }
    }
    println!("  C_reg(2s-1) at s=0.75: {:.1e}", regional_power_coeff(0.5, 0.75)?);

    // u = cos(pi x) on (0, 1) has zero flux at both ends, so the rewriting
    // through the half-line operators applies up to the boundary
    let u = SampledFunction::cos_pi();
    println!("\ncos(pi x), s = 0.75: p.v. vs boundary formula");
    for x in [0.0, 1e-3, 0.1, 0.5, 0.9] {
        let b = eval_boundary_formula(&u, x, 0.75)?.value;
        let p = if x > 0.0 { format!("{:+.10}", eval_pv(&u, x, 0.75, &scheme)?.value) } else { "-".into() };
        println!("  x = {x:<6} {p:>14}  {b:+.10}");
    }
    Ok(())
}
