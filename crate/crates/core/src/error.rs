use thiserror::Error;

/// Failure modes shared by every module of the crate.
///
/// The split between [`Error::is_validation`] and the numerical variants
/// mirrors the CLI exit codes: bad input is a caller problem, the rest are
/// numerical failures that come with a diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order s = {0} is outside (0, 1 - 1e-6]")]
    InvalidOrder(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("pole at beta = {beta}: distance {distance:e} to the pole set is inside the guard")]
    Pole { beta: f64, distance: f64 },

    #[error("no sign change in bracket ({lo}, {hi}) for k = {k}: sampled g = {samples:?}")]
    Bracket {
        k: usize,
        lo: f64,
        hi: f64,
        samples: Vec<(f64, f64)>,
    },

    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },

    #[error("ill-conditioned least-squares problem (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Accuracy { estimate: f64, tolerance: f64 },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// `true` for errors caused by the caller's input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidOrder(_) | Error::Domain(_) | Error::Invalid(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
