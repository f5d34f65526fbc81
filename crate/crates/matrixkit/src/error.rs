use thiserror::Error;

/// Failures raised by the linear-algebra kernel.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric: max |S - S^T| = {max_asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { max_asymmetry: f64, tolerance: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{routine} failed to converge within {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },
    #[error("matrix is rank deficient: smallest singular value {smallest:e} vs largest {largest:e}")]
    RankDeficient { smallest: f64, largest: f64 },
    #[error("columns are not orthonormal: max |U^T U - I| = {deviation:e}")]
    NotOrthonormal { deviation: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Hadamard exponent {k} exceeds the supported maximum {max}")]
    HadamardTooLarge { k: u32, max: u32 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
