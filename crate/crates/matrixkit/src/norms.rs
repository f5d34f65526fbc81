use crate::{thin_svd, DenseMatrix, MatrixError, Result};

/// Two-to-infinity norm: the largest Euclidean row norm.
pub fn two_to_infinity_norm(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x * x).sum::<f64>())
        .fold(0.0_f64, f64::max)
        .sqrt()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &DenseMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    Ok(thin_svd(m)?.sigma[0])
}

/// Incoherence `μ = n‖U‖²_{2,∞}/d` of an orthonormal frame.
///
/// The squared norm is used, so that `1 ≤ μ ≤ n/d`.
pub fn incoherence(u: &DenseMatrix) -> Result<f64> {
    let deviation = u.orthonormality_defect();
    if deviation > 1e-8 {
        return Err(MatrixError::NotOrthonormal { deviation });
    }
    let t = two_to_infinity_norm(u);
    Ok(u.rows() as f64 * t * t / u.cols() as f64)
}
