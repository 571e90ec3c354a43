//! `regfrac` command line. Every subcommand prints one JSON document on
//! stdout; nodal data go to CSV files. Exit codes: 0 success, 1 invalid
//! input, 2 numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::angular::{angular_spectrum, beta_from_lambda, AngularMesh};
use crate::disk::{check_curvature_identity, solve_disk, CURVATURE_WINDOW};
use crate::error::{Error, Result};
use crate::expansion::{estimate_boundary_holder, fit_boundary_expansion, BoundaryExpansion, HolderEstimate};
use crate::exponents::{critical_exponents, exponent_atlas};
use crate::mesh::GradedMesh;
use crate::operator::{eval_pv, PVScheme, SampledFunction};
use crate::report::{self, default_output_dir, Load, RunConfig};
use crate::selftest::{run_all, Tier};
use crate::solver::{solve_with_estimate, BoundaryCondition};
use crate::special::{full_power_coeff, regional_power_coeff};

#[derive(Debug, Parser)]
#[command(name = "regfrac", version, about = "Regional fractional Laplacian laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponents beta_0..beta_K.
    Exponents {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Sweep over orders, `lo:hi:step`.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Half-line coefficients C_full(beta) and C_reg(beta).
    Coeff {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        s: f64,
    },
    /// Angular eigenpairs and the exponents they imply.
    Eigen {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 3)]
        modes: usize,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        /// Write eigenfunctions to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Quadrature value of (-Delta)^s_{R+} x^beta against the closed form.
    VerifyPower {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
    },
    /// Galerkin solve on (0, 1) with a boundary-expansion fit.
    Solve1d {
        #[arg(long)]
        bc: BoundaryCondition,
        #[arg(long)]
        s: f64,
        /// const1, cospix or custom:<file.csv>.
        #[arg(long, default_value = "const1")]
        f: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long)]
        mu: Option<f64>,
        /// Fit window (0, w] at the left end.
        #[arg(long, default_value_t = 0.05)]
        window: f64,
        /// Nodal dump; defaults to `solve1d.csv` in the output directory.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Boundary-expansion fit of a nodal CSV (x, u).
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.05)]
        window: f64,
    },
    /// Radial Dirichlet solve on the unit disk and the boundary quotient check.
    Disk {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        mu: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Runs the acceptance checks.
    Selftest {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
    },
}

fn parse_sweep(spec: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match nums.as_deref() {
        Some([a, b, c]) => Ok((*a, *b, *c)),
        _ => Err(Error::Invalid(format!("--sweep expects lo:hi:step, got '{spec}'"))),
    }
}

fn out_path(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| default_output_dir().join(default_name))
}

#[derive(Serialize)]
struct CoeffResult {
    full: f64,
    regional: f64,
}

#[derive(Serialize)]
struct EigenMode {
    k: usize,
    lambda: f64,
    beta: Option<f64>,
}

#[derive(Serialize)]
struct EigenResult {
    modes: Vec<EigenMode>,
    beta_roots: Vec<f64>,
    csv: Option<String>,
}

#[derive(Serialize)]
struct PowerResult {
    quadrature: f64,
    error_estimate: f64,
    closed_form: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct SolveResult {
    energy: f64,
    mean_correction: f64,
    error_estimate: Option<f64>,
    fit: Option<BoundaryExpansion>,
    fit_error: Option<String>,
    warnings: Vec<String>,
    csv: String,
}

#[derive(Serialize)]
struct FitResult {
    fit: BoundaryExpansion,
    holder: Option<HolderEstimate>,
    holder_error: Option<String>,
}

/// Runs one command and returns the JSON document, or the error and whether it is a failed selftest.
fn execute(cmd: Command) -> Result<(String, bool)> {
    match cmd {
        Command::Exponents { s, k, sweep, tol } => {
            let cfg = RunConfig::new("exponents").with("k", k).with("tol", tol);
            match (s, sweep) {
                (_, Some(sw)) => {
                    let (lo, hi, step) = parse_sweep(&sw)?;
                    let cfg = cfg.with("sweep", [lo, hi, step]);
                    Ok((report::document(&cfg, &exponent_atlas(lo, hi, step, k, tol)?)?, true))
                }
                (Some(s), None) => {
                    let cfg = cfg.with("s", s);
                    Ok((report::document(&cfg, &critical_exponents(s, k, tol)?)?, true))
                }
                (None, None) => Err(Error::Invalid("exponents needs --s or --sweep".into())),
            }
        }
        Command::Coeff { beta, s } => {
            let cfg = RunConfig::new("coeff").with("beta", beta).with("s", s);
            let res = CoeffResult { full: full_power_coeff(beta, s)?, regional: regional_power_coeff(beta, s)? };
            Ok((report::document(&cfg, &res)?, true))
        }
        Command::Eigen { s, modes, n, mu, csv } => {
            let cfg = RunConfig::new("eigen").with("s", s).with("modes", modes).with("n", n).with("mu", mu);
            let pairs = angular_spectrum(s, n, mu, modes)?;
            let roots = critical_exponents(s, modes.saturating_sub(1).max(1), 1e-13)?.beta;
            let csv = match csv {
                Some(p) => {
                    report::write_eigen_csv(&p, AngularMesh::graded(n, mu)?.nodes(), &pairs)?;
                    Some(p.display().to_string())
                }
                None => None,
            };
            let modes = pairs
                .iter()
                .map(|p| EigenMode { k: p.k, lambda: p.lambda, beta: beta_from_lambda(p.lambda, s).ok() })
                .collect();
            Ok((report::document(&cfg, &EigenResult { modes, beta_roots: roots, csv })?, true))
        }
        Command::VerifyPower { s, beta, x } => {
            let cfg = RunConfig::new("verify-power").with("s", s).with("beta", beta).with("x", x);
            let u = SampledFunction::power(beta)?;
            let v = eval_pv(&u, x, s, &PVScheme::default())?;
            let closed = regional_power_coeff(beta, s)? * x.powf(beta - 2.0 * s);
            let res = PowerResult {
                quadrature: v.value,
                error_estimate: v.error,
                closed_form: closed,
                relative_error: (v.value - closed).abs() / closed.abs(),
            };
            Ok((report::document(&cfg, &res)?, true))
        }
        Command::Solve1d { bc, s, f, n, mu, window, csv } => {
            let mu = mu.unwrap_or(bc.default_grading());
            let path = out_path(csv, "solve1d.csv");
            let cfg = RunConfig::new("solve1d")
                .with("bc", bc)
                .with("s", s)
                .with("f", &f)
                .with("n", n)
                .with("mu", mu)
                .with("window", window);
            let load = Load::parse(&f)?;
            let sol = solve_with_estimate(bc, |x| load.eval(x), &GradedMesh::symmetric(n, mu)?, s)?;
            report::write_solution_csv(&path, &sol)?;
            let beta1 = critical_exponents(s, 1, 1e-13)?.beta[1];
            let (fit, fit_error) = match fit_boundary_expansion(&sol.nodes, &sol.values, s, beta1, window) {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let res = SolveResult {
                energy: sol.energy,
                mean_correction: sol.mean_correction,
                error_estimate: sol.error_estimate(),
                fit,
                fit_error,
                warnings: sol.warnings.clone(),
                csv: path.display().to_string(),
            };
            Ok((report::document(&cfg, &res)?, true))
        }
        Command::Fit { input, s, window } => {
            let cfg = RunConfig::new("fit").with("input", input.display().to_string()).with("s", s).with("window", window);
            let (x, u) = report::read_two_columns(&input)?;
            let beta1 = critical_exponents(s, 1, 1e-13)?.beta[1];
            let fit = fit_boundary_expansion(&x, &u, s, beta1, window)?;
            let (holder, holder_error) = match estimate_boundary_holder(&x, &u, None, &fit) {
                Ok(h) => (Some(h), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Ok((report::document(&cfg, &FitResult { fit, holder, holder_error })?, true))
        }
        Command::Disk { s, n, mu, csv } => {
            let path = out_path(csv, "disk.csv");
            let cfg = RunConfig::new("disk").with("s", s).with("n", n).with("mu", mu).with("window", CURVATURE_WINDOW);
            let sol = solve_disk(|_| 1.0, &GradedMesh::toward_right(n, mu)?, s)?;
            report::write_disk_csv(&path, &sol)?;
            let beta1 = critical_exponents(s, 1, 1e-13)?.beta[1];
            let rep = check_curvature_identity(&sol, beta1, CURVATURE_WINDOW)?;
            Ok((report::document(&cfg, &rep)?, true))
        }
        Command::Selftest { quick, full: _ } => {
            let tier = if quick { Tier::Quick } else { Tier::Full };
            let cfg = RunConfig::new("selftest").with("tier", if quick { "quick" } else { "full" });
            let results = run_all(tier);
            for c in &results {
                eprintln!("{c}");
            }
            let ok = results.iter().all(|c| c.passed);
            Ok((report::document(&cfg, &results)?, ok))
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli.command) {
        Ok((doc, ok)) => {
            // a closed pipe (e.g. `| head`) is not an error of the run
            let _ = writeln!(std::io::stdout().lock(), "{doc}");
            if ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}
