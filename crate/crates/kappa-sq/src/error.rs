use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has orthonormality defect {defect:.3e}, above the limit {limit:.3e}")]
    NotOrthonormal { defect: f64, limit: f64 },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid leverage profile: {0}")]
    InvalidProfile(#[from] ProfileViolations),

    #[error("coherence {mu} outside the valid range [{lo}, {hi}]")]
    CoherenceOutOfRange { mu: f64, lo: f64, hi: f64 },

    #[error("sample count {c} outside [1, {m}]")]
    SampleCountOutOfRange { c: usize, m: usize },

    #[error("rotation target {target} outside the achievable interval [{lo}, {hi}]")]
    UnreachableTarget { target: f64, lo: f64, hi: f64 },

    #[error("invalid bound query: {0}")]
    InvalidQuery(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

/// Every invariant a candidate leverage profile failed, with measured values.
#[derive(Debug, Clone, Error)]
pub struct ProfileViolations {
    pub violations: Vec<String>,
}

impl std::fmt::Display for ProfileViolations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.violations.join("; "))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
