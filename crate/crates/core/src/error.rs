use std::path::PathBuf;

/// Errors raised by `cbm-core`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no finite detection threshold at epsilon = 0.5 (the edges carry no information)")]
    NoFiniteThreshold,

    #[error("infinite coupling at epsilon = {0}")]
    InfiniteCoupling(f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid sparse matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix has dimension zero")]
    EmptyMatrix,

    #[error("dimension {dim} exceeds dense cap {cap}; use a smaller instance")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("dense eigensolver failed: {0}")]
    DenseSolver(String),

    #[error("reduction invalid at ±1 (lambda = {0})")]
    ReductionAtUnit(f64),

    #[error("{path}:{line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },

    #[error("missing required option: {0}")]
    MissingOption(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
