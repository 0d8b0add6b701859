use thiserror::Error;

/// Errors produced by the synthesis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("subspace indices must be strictly decreasing and distinct, got {0:?}")]
    InvalidIndices(Vec<usize>),

    #[error("rotations act on different subspaces: {left:?} vs {right:?}")]
    SubspaceMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("rotations {left:?} and {right:?} do not chain through a shared middle index")]
    NotChained { left: Vec<usize>, right: Vec<usize> },

    #[error("three-level pairing needs dimension >= 3, got {0}")]
    DimensionTooSmall(usize),

    #[error("elimination did not converge (residual {residual:e})")]
    NonConvergent { residual: f64 },

    #[error("unknown gate name `{0}`")]
    UnknownGate(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("unsupported radix {0} (expected 2 or 3)")]
    UnsupportedRadix(usize),

    #[error("register dimension {dim} exceeds the dense-evaluation cap of {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("malformed matrix JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
