//! Alignment of latent positions over `𝕆_d ∩ 𝕆_{p,q}`.
//!
//! Orthogonal matrices that preserve `I_{p,q}` commute with it and are
//! therefore block diagonal, `W = diag(W_p, W_q)`. Minimising the Frobenius
//! residual `‖X̂W − X‖_F` over that group splits into two classical
//! orthogonal Procrustes problems. The two-to-infinity residual at that
//! minimiser is an upper bound for the exact two-to-infinity minimum, which
//! [`grid_minimum`] brackets for small signatures.

mod oracle;

use matrixkit::{thin_svd, two_to_infinity_norm, DenseMatrix, MatrixError};
use netmodel::{Signature, SpectralPair};
use thiserror::Error;

pub use oracle::{dedup_row_pairs, grid_minimum, Objective, OracleResult, WeightedRows};

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("signature mismatch: ({0}, {1}) vs ({2}, {3})")]
    SignatureMismatch(usize, usize, usize, usize),
    #[error("block is not orthogonal (deviation {0:e})")]
    NotOrthogonal(f64),
    #[error("grid oracle supports p <= 2 and q <= 1, got ({p}, {q})")]
    UnsupportedSignature { p: usize, q: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub type Result<T> = std::result::Result<T, AlignmentError>;

/// Orthogonality tolerance for rotation blocks.
pub const BLOCK_ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// `W = diag(w_p, w_q)` with orthogonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRotation {
    w_p: DenseMatrix,
    w_q: DenseMatrix,
    /// Set when a cross-Gram block was rank deficient, so that the
    /// minimiser is not unique and the returned one follows the SVD
    /// completion convention.
    pub rank_deficient: bool,
}

impl BlockRotation {
    pub fn new(w_p: DenseMatrix, w_q: DenseMatrix) -> Result<Self> {
        for w in [&w_p, &w_q] {
            if w.rows() != w.cols() {
                return Err(AlignmentError::Shape("rotation blocks must be square".into()));
            }
            let dev = w.orthonormality_defect();
            if dev > BLOCK_ORTHOGONALITY_TOLERANCE {
                return Err(AlignmentError::NotOrthogonal(dev));
            }
        }
        Ok(Self { w_p, w_q, rank_deficient: false })
    }

    pub fn identity(sig: Signature) -> Self {
        Self { w_p: DenseMatrix::identity(sig.p), w_q: DenseMatrix::identity(sig.q), rank_deficient: false }
    }

    pub fn w_p(&self) -> &DenseMatrix {
        &self.w_p
    }

    pub fn w_q(&self) -> &DenseMatrix {
        &self.w_q
    }

    pub fn signature(&self) -> Signature {
        Signature { p: self.w_p.rows(), q: self.w_q.rows() }
    }

    /// The assembled `d × d` matrix.
    pub fn assemble(&self) -> DenseMatrix {
        let (p, q) = (self.w_p.rows(), self.w_q.rows());
        DenseMatrix::from_fn(p + q, p + q, |i, j| {
            if i < p && j < p {
                self.w_p.get(i, j)
            } else if i >= p && j >= p {
                self.w_q.get(i - p, j - p)
            } else {
                0.0
            }
        })
    }

    /// `X · W`.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(x.matmul(&self.assemble())?)
    }
}

/// Orthogonal matrix maximising `tr(Wᵀ G)` for square `G`. Singular
/// directions with zero singular value are completed to an orthonormal
/// basis deterministically (Gram–Schmidt on the standard basis).
fn procrustes_block(g: &DenseMatrix) -> Result<(DenseMatrix, bool)> {
    let k = g.rows();
    if k == 0 {
        return Ok((DenseMatrix::zeros(0, 0), false));
    }
    let svd = thin_svd(g)?;
    let largest = svd.sigma[0];
    let tol = 1e-12 * largest.max(f64::MIN_POSITIVE);
    let rank = svd.sigma.iter().filter(|&&s| s > tol).count();
    let mut u = svd.u.clone();
    if rank < k {
        let mut basis: Vec<Vec<f64>> = (0..rank).map(|j| u.column(j)).collect();
        let mut e = 0;
        while basis.len() < k {
            let mut cand: Vec<f64> = (0..k).map(|i| if i == e { 1.0 } else { 0.0 }).collect();
            e += 1;
            for _ in 0..2 {
                for b in &basis {
                    let c: f64 = cand.iter().zip(b).map(|(x, y)| x * y).sum();
                    cand.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nc = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nc > 1e-8 {
                cand.iter_mut().for_each(|x| *x /= nc);
                basis.push(cand);
            }
        }
        for (j, col) in basis.iter().enumerate() {
            u.set_column(j, col);
        }
    }
    Ok((u.matmul(&svd.v.transpose())?, rank < k))
}

fn check_shapes(xhat: &DenseMatrix, x: &DenseMatrix, sig: Signature) -> Result<()> {
    if xhat.shape() != x.shape() {
        return Err(AlignmentError::Shape(format!("{:?} vs {:?}", xhat.shape(), x.shape())));
    }
    if xhat.cols() != sig.d() {
        return Err(AlignmentError::Shape(format!("{} columns for d = {}", xhat.cols(), sig.d())));
    }
    Ok(())
}

/// `argmin_W ‖X̂ W − X‖_F` over block-diagonal orthogonal `W`, solved as two
/// independent orthogonal Procrustes problems on the column blocks.
pub fn block_procrustes(xhat: &DenseMatrix, x: &DenseMatrix, sig: Signature) -> Result<BlockRotation> {
    check_shapes(xhat, x, sig)?;
    let d = sig.d();
    let gram = xhat.t_matmul(x)?;
    let block = |lo: usize, hi: usize| DenseMatrix::from_fn(hi - lo, hi - lo, |i, j| gram.get(lo + i, lo + j));
    let (w_p, dp) = procrustes_block(&block(0, sig.p))?;
    let (w_q, dq) = procrustes_block(&block(sig.p, d))?;
    Ok(BlockRotation { w_p, w_q, rank_deficient: dp || dq })
}

/// Alignment summary: rotation plus both residual norms.
#[derive(Debug, Clone)]
pub struct Alignment {
    pub rotation: BlockRotation,
    pub frobenius: f64,
    pub two_to_infinity: f64,
}

/// Block Procrustes rotation together with the Frobenius and
/// two-to-infinity residuals of `X̂W − X`.
pub fn align(xhat: &DenseMatrix, x: &DenseMatrix, sig: Signature) -> Result<Alignment> {
    let rotation = block_procrustes(xhat, x, sig)?;
    let resid = rotation.apply(xhat)?.sub(x)?;
    Ok(Alignment { frobenius: resid.frobenius_norm(), two_to_infinity: two_to_infinity_norm(&resid), rotation })
}

/// `‖X̂ W* − X‖_{2,∞}` at the Frobenius minimiser `W*`: an upper bound on
/// the exact two-to-infinity minimum over the group.
pub fn tti_distance(xhat: &DenseMatrix, x: &DenseMatrix, sig: Signature) -> Result<f64> {
    Ok(align(xhat, x, sig)?.two_to_infinity)
}

fn check_pairs(a: &SpectralPair, b: &SpectralPair) -> Result<()> {
    let (sa, sb) = (a.signature(), b.signature());
    if sa != sb {
        return Err(AlignmentError::SignatureMismatch(sa.p, sa.q, sb.p, sb.q));
    }
    if a.n() != b.n() {
        return Err(AlignmentError::Shape(format!("n = {} vs n = {}", a.n(), b.n())));
    }
    Ok(())
}

/// Two-to-infinity distance between the canonical representatives
/// `U_a Λ_a^{1/2}` and `U_b Λ_b^{1/2}`, using the Frobenius minimiser.
pub fn dtilde_tti(a: &SpectralPair, b: &SpectralPair) -> Result<f64> {
    check_pairs(a, b)?;
    tti_distance(&a.latent_positions(), &b.latent_positions(), a.signature())
}

/// Grid-oracle bracket of the exact distance between two pairs (see
/// [`grid_minimum`]).
pub fn dtilde_tti_oracle(a: &SpectralPair, b: &SpectralPair, step: f64) -> Result<OracleResult> {
    check_pairs(a, b)?;
    grid_minimum(&a.latent_positions(), &b.latent_positions(), a.signature(), Objective::TwoToInfinity, step)
}

/// `true` iff `‖X I_{p,q} Xᵀ − Y I_{p,q} Yᵀ‖_max ≤ tol`.
pub fn check_equivalence(x: &DenseMatrix, y: &DenseMatrix, sig: Signature, tol: f64) -> Result<bool> {
    check_shapes(x, y, sig)?;
    let n = x.rows();
    let d = sig.d();
    for i in 0..n {
        let (xi, yi) = (x.row(i), y.row(i));
        for j in i..n {
            let (xj, yj) = (x.row(j), y.row(j));
            let mut diff = 0.0;
            for k in 0..d {
                diff += sig.sign(k) * (xi[k] * xj[k] - yi[k] * yj[k]);
            }
            if diff.abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
