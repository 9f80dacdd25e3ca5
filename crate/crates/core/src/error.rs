use thiserror::Error;

/// Errors raised by the numerical layers. Cost functions never surface these;
/// they collapse every failure into the infeasibility sentinel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("singular resolvent at omega = {omega}")]
    SingularResolvent { omega: f64 },

    #[error("ill-posed feedback loop (reciprocal condition number {rcond:e})")]
    IllPosed { rcond: f64 },

    #[error("system is not stable (spectral radius {rho})")]
    Unstable { rho: f64 },

    #[error("signal diverged past guard {guard:e}")]
    Divergence { guard: f64 },

    #[error("singular D-scale feedthrough (reciprocal condition number {rcond:e})")]
    SingularScale { rcond: f64 },

    #[error("open-loop plant is unstable (spectral radius {rho}); supply a stabilizing initial controller")]
    NeedsStabilizingInit { rho: f64 },

    #[error("initial point is infeasible")]
    InfeasibleStart,

    #[error("cost oracle returned the infeasibility sentinel")]
    EstimateInvalid,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
