use thiserror::Error;

/// Errors raised by the phase-space toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state not resolved on grid: {0}")]
    Unresolved(String),

    #[error("decomposition mismatch: max |K1 - K2 - K| = {max_mismatch:e}")]
    DecompositionMismatch { max_mismatch: f64 },

    #[error("non-positive envelope value {value:e} at cell {index}")]
    NonPositiveEnvelope { index: usize, value: f64 },

    #[error("empty common support: no path has both weights above the floor")]
    EmptySupport,

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("CFL violation: dt = {dt:e} exceeds the stable limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("instability at step {step}: max |W| = {max_abs:e} exceeds {bound:e}")]
    Unstable {
        step: usize,
        max_abs: f64,
        bound: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),
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

impl Error {
    /// Stable kebab-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid-grid",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::InvalidPotential(_) => "invalid-potential",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Unresolved(_) => "unresolved",
            Error::DecompositionMismatch { .. } => "decomposition-mismatch",
            Error::NonPositiveEnvelope { .. } => "non-positive-envelope",
            Error::EmptySupport => "empty-support",
            Error::InvalidEnsemble(_) => "invalid-ensemble",
            Error::Cfl { .. } => "cfl",
            Error::Unstable { .. } => "unstable",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
