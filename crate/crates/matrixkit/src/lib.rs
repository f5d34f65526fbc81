//! Dense linear-algebra kernel.
//!
//! Everything downstream (network models, embeddings, packing constructions)
//! is expressed in terms of [`DenseMatrix`], a row-major `f64` matrix, plus a
//! handful of numerical routines:
//!
//! * Sylvester Hadamard matrices and signature matrices `I_{p,q}`;
//! * symmetric eigendecomposition (Householder tridiagonalisation + implicit
//!   QL) and a Lanczos solver for the extreme eigenpairs of large operators;
//! * one-sided Jacobi SVD and the orthogonal polar factor;
//! * the two-to-infinity norm and incoherence;
//! * CSV and `GMX1` binary matrix I/O.

mod dense;
mod eigen;
mod error;
mod hadamard;
pub mod io;
mod lanczos;
mod norms;
mod svd;

pub use dense::DenseMatrix;
pub use eigen::{symmetric_eigen, top_eigenpairs, EigenSelection, DENSE_EIGEN_LIMIT};
pub use error::MatrixError;
pub use hadamard::{hadamard, signature_matrix, MAX_HADAMARD_EXPONENT};
pub use lanczos::{extreme_eigenpairs, ExtremePairs, LanczosOptions, SymmetricOperator};
pub use norms::{incoherence, operator_norm, two_to_infinity_norm};
pub use svd::{polar_orthogonal_factor, thin_svd, Svd};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, MatrixError>;

/// Relative tolerance used to decide whether a matrix is symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Flip `v` so that its first entry with magnitude above `tiny` is nonnegative.
/// Returns `true` when a flip happened.
pub fn canonical_sign(v: &mut [f64]) -> bool {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tiny = scale * 1e-12;
    for &x in v.iter() {
        if x.abs() > tiny {
            if x < 0.0 {
                v.iter_mut().for_each(|y| *y = -*y);
                return true;
            }
            return false;
        }
    }
    false
}
