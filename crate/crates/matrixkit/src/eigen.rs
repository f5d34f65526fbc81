use crate::lanczos::{extreme_eigenpairs, LanczosOptions};
use crate::{canonical_sign, DenseMatrix, MatrixError, Result, SYMMETRY_TOLERANCE};

/// Matrices up to this order are decomposed densely; larger ones go through
/// the Lanczos solver.
pub const DENSE_EIGEN_LIMIT: usize = 512;

/// A set of eigenpairs: `values[i]` belongs to column `i` of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenSelection {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are returned in descending order; each eigenvector has its
/// first non-negligible component made nonnegative.
pub fn symmetric_eigen(s: &DenseMatrix) -> Result<EigenSelection> {
    let n = s.rows();
    if s.cols() != n {
        return Err(MatrixError::DimensionMismatch("eigendecomposition needs a square matrix".into()));
    }
    s.check_symmetric(SYMMETRY_TOLERANCE)?;
    if n == 0 {
        return Ok(EigenSelection { values: vec![], vectors: DenseMatrix::zeros(0, 0) });
    }
    let mut v = s.data().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    tql2(n, &mut v, &mut d, &mut e)?;
    Ok(sorted_selection(n, &v, &d, n))
}

/// The `k` algebraically largest eigenpairs of a symmetric matrix, in
/// descending order.
pub fn top_eigenpairs(s: &DenseMatrix, k: usize) -> Result<EigenSelection> {
    let n = s.rows();
    if s.cols() != n {
        return Err(MatrixError::DimensionMismatch("top_eigenpairs needs a square matrix".into()));
    }
    if k == 0 || k > n {
        return Err(MatrixError::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
    }
    s.check_symmetric(SYMMETRY_TOLERANCE)?;
    if n <= DENSE_EIGEN_LIMIT {
        let full = symmetric_eigen(s)?;
        return Ok(EigenSelection {
            values: full.values[..k].to_vec(),
            vectors: full.vectors.select_columns(0, k),
        });
    }
    let pairs = extreme_eigenpairs(s, k, 0, &LanczosOptions::default())?;
    Ok(pairs.top)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal (`off[i]` couples `i` and `i+1`).
/// Returns (ascending values, row-major eigenvector matrix with matching columns).
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    tql2(n, &mut v, &mut d, &mut e)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for r in 0..n {
        for (c, &src) in order.iter().enumerate() {
            vectors[r * n + c] = v[r * n + src];
        }
    }
    Ok((values, vectors))
}

fn sorted_selection(n: usize, v: &[f64], d: &[f64], k: usize) -> EigenSelection {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let mut vectors = DenseMatrix::zeros(n, k);
    let mut values = Vec::with_capacity(k);
    for (c, &idx) in order.iter().take(k).enumerate() {
        let mut col: Vec<f64> = (0..n).map(|r| v[r * n + idx]).collect();
        canonical_sign(&mut col);
        vectors.set_column(c, &col);
        values.push(d[idx]);
    }
    EigenSelection { values, vectors }
}

/// Householder reduction of a symmetric matrix (row-major in `v`) to
/// tridiagonal form, accumulating the orthogonal transformation in `v`.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |r: usize, c: usize| r * n + c;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iterations on a symmetric tridiagonal matrix (`d` diagonal,
/// `e[i]` coupling `i` and `i+1`), accumulating rotations into `v`.
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let at = |r: usize, c: usize| r * n + c;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(MatrixError::NoConvergence { routine: "tql2", iterations: MAX_SWEEPS });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let hk = v[at(k, i + 1)];
                        let vk = v[at(k, i)];
                        v[at(k, i + 1)] = s * vk + c * hk;
                        v[at(k, i)] = c * vk - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
