use crate::{canonical_sign, DenseMatrix, MatrixError, Result};

/// Thin singular value decomposition `A = U diag(sigma) Vᵀ` of an `m×k`
/// matrix with `m ≥ k`: `U` is `m×k`, `V` is `k×k`, `sigma` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns are orthogonalised by plane rotations applied identically to every
/// row, so equal rows of the input stay bit-for-bit equal in `U`. Matrices with
/// more columns than rows are handled through their transpose.
pub fn thin_svd(a: &DenseMatrix) -> Result<Svd> {
    let (m, k) = a.shape();
    if m < k {
        let t = thin_svd(&a.transpose())?;
        return Ok(Svd { u: t.v, sigma: t.sigma, v: t.u });
    }
    // Work column-major for cache-friendly rotations.
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..k).map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    const MAX_SWEEPS: usize = 80;
    let mut converged = k < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        al += x * x;
                        be += y * y;
                        ga += x * y;
                    }
                    (al, be, ga)
                };
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MatrixError::NoConvergence { routine: "jacobi svd", iterations: MAX_SWEEPS });
    }
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let mut u = DenseMatrix::zeros(m, k);
    let mut vm = DenseMatrix::zeros(k, k);
    let mut sigma = Vec::with_capacity(k);
    for (c, &j) in order.iter().enumerate() {
        let s = norms[j];
        let mut vcol = v[j].clone();
        let flipped = canonical_sign(&mut vcol);
        let sign = if flipped { -1.0 } else { 1.0 };
        for i in 0..m {
            let val = if s > 0.0 { sign * cols[j][i] / s } else { 0.0 };
            u.set(i, c, val);
        }
        vm.set_column(c, &vcol);
        sigma.push(s);
    }
    Ok(Svd { u, sigma, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Orthogonal polar factor `Ũ Ṽᵀ` of a full-column-rank `n×d` matrix.
///
/// This is the orthonormal-column matrix closest to `g` in Frobenius norm.
pub fn polar_orthogonal_factor(g: &DenseMatrix) -> Result<DenseMatrix> {
    if g.rows() < g.cols() {
        return Err(MatrixError::DimensionMismatch("polar factor needs rows >= cols".into()));
    }
    let svd = thin_svd(g)?;
    let largest = svd.sigma.first().copied().unwrap_or(0.0);
    let smallest = svd.sigma.last().copied().unwrap_or(0.0);
    if smallest <= 1e-12 * largest || largest == 0.0 {
        return Err(MatrixError::RankDeficient { smallest, largest });
    }
    svd.u.matmul(&svd.v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_small_matrix() {
        let a = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 3.0], vec![0.5, -0.5]]).unwrap();
        let s = thin_svd(&a).unwrap();
        let rec = s.u.scale_columns(&s.sigma).matmul(&s.v.transpose()).unwrap();
        assert!(rec.sub(&a).unwrap().max_abs() < 1e-14);
        assert!(s.sigma[0] >= s.sigma[1]);
    }

    #[test]
    fn wide_matrix_via_transpose() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let s = thin_svd(&a).unwrap();
        assert_eq!(s.u.shape(), (2, 2));
        assert_eq!(s.v.shape(), (3, 2));
        let rec = s.u.scale_columns(&s.sigma).matmul(&s.v.transpose()).unwrap();
        assert!(rec.sub(&a).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn polar_of_rank_deficient_fails() {
        let g = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(polar_orthogonal_factor(&g), Err(MatrixError::RankDeficient { .. })));
    }
}
