use matrixkit::MatrixError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid signature ({p}, {q}): need p + q >= 1")]
    InvalidSignature { p: usize, q: usize },
    #[error("invalid spectral pair: {0}")]
    InvalidPair(String),
    #[error("sparsity {0} must lie in (0, 1]")]
    InvalidSparsity(f64),
    #[error("probability entry ({i}, {j}) = {value} lies outside [0, 1]")]
    InvalidModel { i: usize, j: usize, value: f64 },
    #[error("matrix is not a valid adjacency matrix: {0}")]
    InvalidAdjacency(String),
    #[error("latent positions are rank deficient (smallest second-moment eigenvalue {0:e})")]
    RankDeficient(f64),
    #[error("condition window undefined: lower eigenvalue {lower:e} does not exceed the deviation {deviation:e}")]
    WindowUndefined { lower: f64, deviation: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
