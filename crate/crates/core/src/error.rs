//! Crate-wide error type.

use thiserror::Error;

use crate::hilbert::DensityCheck;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("input vector has zero (or non-finite) norm")]
    DegenerateInput,

    #[error("state vector must be normalized, got norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("operator is not a valid density operator: hermiticity defect {0:?}")]
    InvalidDensity(DensityCheck),

    #[error("not Hermitian within tolerance: defect {defect}")]
    NotHermitian { defect: f64 },

    #[error("invalid probability vector: {reason}")]
    InvalidProbabilityVector { reason: String },

    #[error("grid cannot resolve interval {interval}: zero points allocated")]
    UnresolvablePartition { interval: usize },

    #[error("degenerate estimate: trace {trace} below the noise floor")]
    DegenerateEstimate { trace: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("window {index} contains no samples")]
    EmptyWindow { index: usize },

    #[error("kernel hypothesis violated: reference vectors not orthonormal (defect {defect})")]
    KernelHypothesis { defect: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid scenario field `{field}`: {message}")]
    InvalidScenario { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }
}
