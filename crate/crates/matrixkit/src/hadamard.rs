use crate::{DenseMatrix, MatrixError, Result};

/// Largest exponent accepted by [`hadamard`]; `2^14 = 16384` rows is already
/// a 2 GiB matrix.
pub const MAX_HADAMARD_EXPONENT: u32 = 14;

/// Sylvester Hadamard matrix of order `2^k`:
/// `H_1 = [1]`, `H_{2m} = [[H_m, H_m], [H_m, -H_m]]`.
pub fn hadamard(k: u32) -> Result<DenseMatrix> {
    if k > MAX_HADAMARD_EXPONENT {
        return Err(MatrixError::HadamardTooLarge { k, max: MAX_HADAMARD_EXPONENT });
    }
    let n = 1usize << k;
    // Entry (i, j) of the Sylvester matrix is (-1)^{popcount(i & j)}.
    Ok(DenseMatrix::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 }))
}

/// Diagonal signature matrix `I_{p,q} = diag(1,…,1,−1,…,−1)`.
pub fn signature_matrix(p: usize, q: usize) -> DenseMatrix {
    let diag: Vec<f64> = (0..p + q).map(|i| if i < p { 1.0 } else { -1.0 }).collect();
    DenseMatrix::from_diagonal(&diag)
}
