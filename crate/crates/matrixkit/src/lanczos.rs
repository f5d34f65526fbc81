use crate::dense::dot;
use crate::eigen::{tridiagonal_eigen, EigenSelection};
use crate::{canonical_sign, DenseMatrix, MatrixError, Result};

/// A symmetric linear operator `x ↦ S x` on `R^n`.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// Overwrite `y` with `S x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

/// Knobs for [`extreme_eigenpairs`].
#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Target residual `‖S v − θ v‖` relative to the spectral-norm estimate.
    pub tolerance: f64,
    /// Hard cap on the Krylov dimension.
    pub max_iterations: usize,
    /// Ritz extraction cadence.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 3000, check_every: 8 }
    }
}

/// Extreme eigenpairs: `top` holds the largest values in descending order,
/// `bottom` the smallest in ascending order.
#[derive(Debug, Clone)]
pub struct ExtremePairs {
    pub top: EigenSelection,
    pub bottom: EigenSelection,
    /// Spectral-norm estimate (largest |Ritz value|).
    pub norm_estimate: f64,
    /// Krylov dimension at convergence.
    pub iterations: usize,
    /// Ritz value just inside the top selection (an unconverged estimate of
    /// the next eigenvalue), if the Krylov space was large enough.
    pub next_top: Option<f64>,
    /// Ritz value just inside the bottom selection.
    pub next_bottom: Option<f64>,
}

/// Lanczos with full reorthogonalisation for the `n_top` largest and
/// `n_bottom` smallest eigenpairs of a symmetric operator.
///
/// The start vector is a fixed pseudo-random vector, so results are fully
/// deterministic. Invariant subspaces are handled by restarting with a fresh
/// vector orthogonal to the current basis.
pub fn extreme_eigenpairs<O: SymmetricOperator + ?Sized>(
    op: &O,
    n_top: usize,
    n_bottom: usize,
    opts: &LanczosOptions,
) -> Result<ExtremePairs> {
    let n = op.dim();
    let want = n_top + n_bottom;
    if want == 0 || want > n {
        return Err(MatrixError::InvalidArgument(format!(
            "requested {want} eigenpairs of an operator of dimension {n}"
        )));
    }
    let max_m = opts.max_iterations.min(n).max(want);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut v = start_vector(n, 0);
    let mut w = vec![0.0; n];
    let mut restarts = 0u64;
    let mut scale = 0.0_f64;

    loop {
        op.apply(&v, &mut w);
        let a = dot(&w, &v);
        axpy(-a, &v, &mut w);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(-b, prev, &mut w);
        }
        basis.push(v);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        scale = scale.max(a.abs()).max(b);
        let m = basis.len();
        let breakdown = b <= 1e-13 * scale.max(f64::MIN_POSITIVE);
        let exhausted = m == n;
        let check = m >= want && (m % opts.check_every == 0 || breakdown || exhausted || m == max_m);

        if check {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta_padded(&beta, m))?;
            let norm_est = theta.iter().fold(0.0_f64, |x, t| x.max(t.abs())).max(f64::MIN_POSITIVE);
            let resid_b = if breakdown || exhausted { 0.0 } else { b };
            let picks = pick_indices(&theta, n_top, n_bottom);
            let converged = picks.iter().all(|&i| (resid_b * s[(m - 1) * m + i]).abs() <= opts.tolerance * norm_est);
            if converged {
                let result = assemble(op, &basis, &theta, &s, m, n_top, n_bottom, norm_est);
                let worst = result.1;
                if worst <= 1e-8 * norm_est || exhausted {
                    let (top, bottom) = result.0;
                    let next_top = (m > want).then(|| theta[m - 1 - n_top]);
                    let next_bottom = (m > want).then(|| theta[n_bottom]);
                    return Ok(ExtremePairs {
                        top,
                        bottom,
                        norm_estimate: norm_est,
                        iterations: m,
                        next_top,
                        next_bottom,
                    });
                }
            }
            if m >= max_m {
                return Err(MatrixError::NoConvergence { routine: "lanczos", iterations: m });
            }
        }
        if exhausted {
            return Err(MatrixError::NoConvergence { routine: "lanczos", iterations: m });
        }

        if breakdown {
            // Invariant subspace found: continue from a fresh orthogonal direction.
            restarts += 1;
            let mut fresh = start_vector(n, restarts);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&fresh, q);
                    axpy(-c, q, &mut fresh);
                }
            }
            let nf = dot(&fresh, &fresh).sqrt();
            fresh.iter_mut().for_each(|x| *x /= nf);
            beta.push(0.0);
            v = fresh;
        } else {
            beta.push(b);
            v = w.iter().map(|x| x / b).collect();
        }
    }
}

fn beta_padded(beta: &[f64], m: usize) -> Vec<f64> {
    let mut off = vec![0.0; m];
    off[..m - 1].copy_from_slice(&beta[..m - 1]);
    off
}

/// Indices (into ascending `theta`) of the requested extremes.
fn pick_indices(theta: &[f64], n_top: usize, n_bottom: usize) -> Vec<usize> {
    let m = theta.len();
    let mut idx: Vec<usize> = (0..m).rev().take(n_top).collect();
    idx.extend(0..n_bottom);
    idx
}

#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn assemble<O: SymmetricOperator + ?Sized>(
    op: &O,
    basis: &[Vec<f64>],
    theta: &[f64],
    s: &[f64],
    m: usize,
    n_top: usize,
    n_bottom: usize,
    _norm_est: f64,
) -> ((EigenSelection, EigenSelection), f64) {
    let n = op.dim();
    let mut worst = 0.0_f64;
    let mut ritz = |col: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (j, q) in basis.iter().enumerate().take(m) {
            axpy(s[j * m + col], q, &mut x);
        }
        let nx = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        canonical_sign(&mut x);
        let mut y = vec![0.0; n];
        op.apply(&x, &mut y);
        axpy(-theta[col], &x, &mut y);
        worst = worst.max(dot(&y, &y).sqrt());
        x
    };
    let mut top = EigenSelection { values: Vec::new(), vectors: DenseMatrix::zeros(n, n_top) };
    for (c, i) in (0..m).rev().take(n_top).enumerate() {
        let x = ritz(i);
        top.vectors.set_column(c, &x);
        top.values.push(theta[i]);
    }
    let mut bottom = EigenSelection { values: Vec::new(), vectors: DenseMatrix::zeros(n, n_bottom) };
    for i in 0..n_bottom {
        let x = ritz(i);
        bottom.vectors.set_column(i, &x);
        bottom.values.push(theta[i]);
    }
    ((top, bottom), worst)
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Deterministic pseudo-random unit vector (SplitMix64 stream).
fn start_vector(n: usize, stream: u64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_with_multiplicity() {
        let s = DenseMatrix::identity(30);
        let r = extreme_eigenpairs(&s, 2, 1, &LanczosOptions::default()).unwrap();
        assert_eq!(r.top.values.len(), 2);
        for v in r.top.values.iter().chain(&r.bottom.values) {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(r.top.vectors.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn low_rank_indefinite_breakdown() {
        // Rank-2 indefinite matrix: Krylov space becomes invariant early.
        let n = 40;
        let h = 1.0 / (n as f64).sqrt();
        let u: Vec<f64> = vec![h; n];
        let w: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { h } else { -h }).collect();
        let s = DenseMatrix::from_fn(n, n, |i, j| 5.0 * u[i] * u[j] - 2.0 * w[i] * w[j]);
        let r = extreme_eigenpairs(&s, 1, 1, &LanczosOptions::default()).unwrap();
        assert!((r.top.values[0] - 5.0).abs() < 1e-10);
        assert!((r.bottom.values[0] + 2.0).abs() < 1e-10);
    }
}
