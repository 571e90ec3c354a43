//! Output documents and nodal dumps.
//!
//! Every JSON document carries the resolved run configuration and the library
//! version; floats are rounded to 15 significant digits so that identical
//! configurations produce byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::angular::EigenPair;
use crate::disk::RadialSolution;
use crate::error::{Error, Result};
use crate::solver::Solution;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Directory used for dumps when no explicit path is given.
pub const OUTPUT_DIR_VAR: &str = "REGFRAC_OUTPUT_DIR";

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Resolved parameters of one run, echoed into its output.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub params: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn new(subcommand: &str) -> Self {
        RunConfig { subcommand: subcommand.to_string(), params: BTreeMap::new() }
    }

    pub fn with<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub library: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub result: &'a T,
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.14e}").parse().unwrap_or(x);
            Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to 15 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = round_value(serde_json::to_value(value)?);
    Ok(serde_json::to_string_pretty(&v)?)
}

pub fn document<T: Serialize>(config: &RunConfig, result: &T) -> Result<String> {
    to_json(&Document { library: "regfrac", version: VERSION, config, result })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::Writer::from_path(path)?)
}

/// Columns `x, u, q` with `q = u / delta^{2s-1}`.
pub fn write_solution_csv(path: &Path, sol: &Solution) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["x", "u", "quotient"])?;
    for ((x, u), q) in sol.nodes.iter().zip(&sol.values).zip(sol.boundary_quotient()) {
        w.write_record([x.to_string(), u.to_string(), q.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `theta, psi_0, psi_1, ...`.
pub fn write_eigen_csv(path: &Path, nodes: &[f64], pairs: &[EigenPair]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["theta".to_string()];
    header.extend(pairs.iter().map(|p| format!("psi_{}", p.k)));
    w.write_record(&header)?;
    for (i, t) in nodes.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(pairs.iter().map(|p| p.psi[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `r, u, psi`.
pub fn write_disk_csv(path: &Path, sol: &RadialSolution) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["r", "u", "psi"])?;
    for ((r, u), p) in sol.nodes.iter().zip(&sol.values).zip(&sol.psi) {
        w.write_record([r.to_string(), u.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the first two numeric columns of a CSV file; a non-numeric first row is taken as a header.
pub fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |j: usize| rec.get(j).and_then(|v| v.parse::<f64>().ok());
        match (parse(0), parse(1)) {
            (Some(x), Some(y)) => {
                a.push(x);
                b.push(y);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(Error::Invalid(format!("{}: row {} is not two numbers", path.display(), i + 1)));
            }
        }
    }
    if a.len() < 2 {
        return Err(Error::Invalid(format!("{}: need at least two rows", path.display())));
    }
    Ok((a, b))
}

/// A named right-hand side: `const1`, `cospix` or `custom:<file.csv>` (columns `x, f`).
#[derive(Debug, Clone)]
pub enum Load {
    Const1,
    CosPi,
    Table { x: Vec<f64>, f: Vec<f64> },
}

impl Load {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "const1" => Ok(Load::Const1),
            "cospix" => Ok(Load::CosPi),
            _ => match name.strip_prefix("custom:") {
                Some(path) => {
                    let (x, f) = read_two_columns(Path::new(path))?;
                    if x.windows(2).any(|w| !(w[0] < w[1])) {
                        return Err(Error::Invalid(format!("{path}: x column must be strictly increasing")));
                    }
                    Ok(Load::Table { x, f })
                }
                None => Err(Error::Invalid(format!(
                    "unknown load '{name}'; expected const1, cospix or custom:<file.csv>"
                ))),
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Load::Const1 => 1.0,
            Load::CosPi => crate::special::cos_pi(x),
            Load::Table { x: xs, f } => {
                let i = xs.partition_point(|p| *p <= x);
                if i == 0 {
                    return f[0];
                }
                if i >= xs.len() {
                    return f[f.len() - 1];
                }
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                f[i - 1] * (1.0 - t) + f[i] * t
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable() {
        let v = serde_json::json!({"a": 0.1 + 0.2, "b": [1.0 / 3.0, 2], "c": "x"});
        let s = to_json(&v).unwrap();
        assert!(s.contains("0.3,") || s.contains("0.3\n"), "{s}");
        assert!(s.contains("0.333333333333333"));
        assert_eq!(s, to_json(&v).unwrap());
    }

    #[test]
    fn loads() {
        assert_eq!(Load::parse("const1").unwrap().eval(0.3), 1.0);
        assert!((Load::parse("cospix").unwrap().eval(0.5)).abs() < 1e-16);
        assert!(Load::parse("sin").is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "x,f\n0,0\n1,2\n").unwrap();
        let l = Load::parse(&format!("custom:{}", p.display())).unwrap();
        assert_eq!(l.eval(0.25), 0.5);
    }
}
