use thiserror::Error;

/// Errors raised by the algebra, geometry and workbench layers.
///
/// Every variant maps to a stable machine-readable [`Error::code`] used in
/// reports.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error("matrix is not invertible")]
    Singular,
    #[error("excluded multidegree {0}: the threshold formula does not apply to (1,...,1,2)")]
    Excluded(String),
    #[error("polynomial is identically zero")]
    IdenticallyZero,
    #[error("degenerate geometry ({flag}): {msg}")]
    Degenerate { flag: String, msg: String },
    #[error("chart error: {0}")]
    Chart(String),
    #[error("degenerate sample, resample: {0}")]
    Resample(String),
    #[error("sampling failed after {trials} trials: {msg}")]
    Sampling { trials: usize, msg: String },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Usage(_) => "usage",
            Error::Precondition(_) => "precondition",
            Error::Degree(_) => "degree",
            Error::InvalidSubspace(_) => "invalid-subspace",
            Error::Singular => "singular",
            Error::Excluded(_) => "excluded-multidegree",
            Error::IdenticallyZero => "identically-zero",
            Error::Degenerate { .. } => "degenerate-geometry",
            Error::Chart(_) => "chart",
            Error::Resample(_) => "resample",
            Error::Sampling { .. } => "sampling-exhausted",
        }
    }

    pub(crate) fn degenerate(flag: &str, msg: impl Into<String>) -> Error {
        Error::Degenerate { flag: flag.to_string(), msg: msg.into() }
    }
}
