//! The CLI workflow through the library: solve, dump the nodal CSV, read it
//! back and fit, with a JSON document that embeds the run configuration.

use regfrac::exponents::critical_exponents;
use regfrac::expansion::fit_boundary_expansion;
use regfrac::mesh::GradedMesh;
use regfrac::report::{self, default_output_dir, Load, RunConfig};
use regfrac::solver::{solve_with_estimate, BoundaryCondition};

fn main() -> regfrac::Result<()> {
    let (s, n) = (0.6, 128);
    let load = Load::parse("cospix")?;
    let sol = solve_with_estimate(BoundaryCondition::Neumann, |x| load.eval(x), &GradedMesh::symmetric(n, 2.0)?, s)?;

    let dir = default_output_dir();
    let path = dir.join("pipeline_solution.csv");
    report::write_solution_csv(&path, &sol)?;

    let (x, u) = report::read_two_columns(&path)?;
    let beta1 = critical_exponents(s, 1, 1e-13)?.beta[1];
    let fit = fit_boundary_expansion(&x, &u, s, beta1, 0.05)?;

    let cfg = RunConfig::new("pipeline").with("s", s).with("n", n).with("f", "cospix");
    println!("{}", report::document(&cfg, &fit)?);
    eprintln!("nodal data in {}", path.display());
    Ok(())
}
