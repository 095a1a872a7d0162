use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the dyadic kernel library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("identical points: no dyadic interval separates x from itself")]
    IdenticalPoints,

    #[error("diagonal evaluation undefined pointwise (x = y)")]
    DiagonalEvaluation,

    #[error("coordinate overflow: {0}")]
    Overflow(&'static str),

    #[error("invalid grid layout: {0}")]
    InvalidLayout(String),

    #[error("malformed coefficient set: {0}")]
    MalformedCoefficients(String),

    #[error("not a norm: p = {0} is below 1")]
    NotANorm(f64),

    #[error("incompatible windows: {0}")]
    IncompatibleWindows(String),

    #[error("not a decreasing eigenvalue sequence (lambda[{index}] = {value} exceeds its predecessor)")]
    NotDecreasing { index: i32, value: f64 },

    #[error("eigenvalue lambda[{index}] = {value} outside [-1, 1]")]
    EigenvalueOutOfRange { index: i32, value: f64 },

    #[error("kernel not nonnegative: k[{index}] = {value:e}")]
    KernelNotNonnegative { index: i32, value: f64 },

    #[error("head weight negative: sigma = {0} must lie in (0, 2)")]
    HeadWeightNegative(f64),

    #[error("insufficient tail: top sampled level {top} is below {required}")]
    InsufficientTail { top: i32, required: i32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pointwise integral divergent for s = 1; use the spectral form")]
    DivergentQuadrature,

    #[error("seed not 1-stable with parameter (2/3)t: estimated sigma {estimated}, expected {expected}")]
    SeedNotStable { estimated: f64, expected: f64 },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Whether the error came from the filesystem rather than from the inputs.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Csv { source, .. } => source.is_io_error(),
            _ => false,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
