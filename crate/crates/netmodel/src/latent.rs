use matrixkit::DenseMatrix;
use rand::Rng;

use crate::rng::row_stream;
use crate::{ModelError, Result};

/// Stream tag separating latent draws from adjacency draws under one seed.
const LATENT_TRIAL: u64 = u64::MAX;

fn sample_rows(n: usize, ranges: &[(f64, f64)], seed: u64) -> DenseMatrix {
    let d = ranges.len();
    let mut x = DenseMatrix::zeros(n, d);
    for i in 0..n {
        let mut rng = row_stream(seed, LATENT_TRIAL, i as u64);
        let row = x.row_mut(i);
        for (v, &(lo, hi)) in row.iter_mut().zip(ranges) {
            *v = lo + (hi - lo) * rng.gen::<f64>();
        }
    }
    x
}

/// `n × d` matrix with iid entries uniform on `[0, 1/√d]`.
pub fn sample_latent_uniform_cube(n: usize, d: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 || d == 0 {
        return Err(ModelError::InvalidArgument("n and d must be positive".into()));
    }
    let hi = 1.0 / (d as f64).sqrt();
    Ok(sample_rows(n, &vec![(0.0, hi); d], seed))
}

/// `n × (p+q)` matrix: the first `p` columns uniform on `[1/(2√p), 1/√p]`,
/// the last `q` uniform on `[0, 1/(2√q)]`.
pub fn sample_latent_grdpg_intervals(n: usize, p: usize, q: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 || p == 0 || q == 0 {
        return Err(ModelError::InvalidArgument("n, p and q must be positive".into()));
    }
    let sp = (p as f64).sqrt();
    let sq = (q as f64).sqrt();
    let mut ranges = vec![(0.5 / sp, 1.0 / sp); p];
    ranges.extend(std::iter::repeat_n((0.0, 0.5 / sq), q));
    Ok(sample_rows(n, &ranges, seed))
}
