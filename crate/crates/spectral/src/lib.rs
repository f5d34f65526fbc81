//! Signed adjacency spectral embedding.
//!
//! For a symmetric matrix `A` and signature `(p, q)` the embedding keeps the
//! `p` largest eigenpairs of `A` and the `q` largest eigenpairs of `−A`:
//! `Û = [Û_p | Û_q]`, `Λ̂ = diag(Λ̂_p, Λ̂_q)` stored as positive magnitudes,
//! and the latent estimate is `Û Λ̂^{1/2}`.

use matrixkit::{extreme_eigenpairs, symmetric_eigen, DenseMatrix, LanczosOptions, MatrixError, DENSE_EIGEN_LIMIT};
use netmodel::{AdjacencyMatrix, ProbabilityMatrix, Signature, SpectralPair};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("signature ({p}, {q}) needs p + q <= n = {n}")]
    TooManyComponents { p: usize, q: usize, n: usize },
    #[error("degenerate spectrum: selected eigenvalue {value:e} has magnitude at most {threshold:e} (signature likely wrong)")]
    DegenerateSpectrum { value: f64, threshold: f64 },
    #[error("selected eigenvalue {value:e} in the {block} block has the wrong sign")]
    WrongSign { value: f64, block: &'static str },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Model(#[from] netmodel::ModelError),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// Orthonormality tolerance for estimated frames.
pub const EMBEDDING_ORTHONORMALITY_TOLERANCE: f64 = 1e-8;
/// Relative threshold below which a selected eigenvalue counts as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Relative gap below which the cutoff is reported as a tie.
pub const TIE_THRESHOLD: f64 = 1e-10;

/// Anything that can be embedded: a symmetric matrix available either as an
/// operator (for large sparse inputs) or densely.
pub trait EmbeddingInput {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Dense view, used for small inputs.
    fn to_dense(&self) -> DenseMatrix;
}

impl EmbeddingInput for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        matrixkit::SymmetricOperator::apply(self, x, y)
    }
    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }
}

impl EmbeddingInput for AdjacencyMatrix {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        matrixkit::SymmetricOperator::apply(self, x, y)
    }
    fn to_dense(&self) -> DenseMatrix {
        AdjacencyMatrix::to_dense(self)
    }
}

impl EmbeddingInput for ProbabilityMatrix {
    fn dim(&self) -> usize {
        self.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        matrixkit::SymmetricOperator::apply(self.entries(), x, y)
    }
    fn to_dense(&self) -> DenseMatrix {
        self.entries().clone()
    }
}

struct AsOperator<'a, T: ?Sized>(&'a T);

impl<T: EmbeddingInput + ?Sized> matrixkit::SymmetricOperator for AsOperator<'_, T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y)
    }
}

/// Result of the signed spectral embedding.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// Estimated frame, positive magnitudes and signature.
    pub pair: SpectralPair,
    /// Raw signed eigenvalues retained, in column order (positive block
    /// first, then the negative block by decreasing magnitude).
    pub eigenvalue_signs: Vec<f64>,
    /// Set when an unselected eigenvalue ties with the last selected one in
    /// either block, so that the selection depended on solver order.
    pub tie_at_cutoff: bool,
    /// Spectral-norm estimate of the input.
    pub input_norm: f64,
}

impl Embedding {
    pub fn frame(&self) -> &DenseMatrix {
        self.pair.frame()
    }

    pub fn magnitudes(&self) -> &[f64] {
        self.pair.magnitudes()
    }

    pub fn signature(&self) -> Signature {
        self.pair.signature()
    }
}

/// Top-`p` eigenpairs of `A` and top-`q` eigenpairs of `−A`.
///
/// Inputs of order at most [`DENSE_EIGEN_LIMIT`] are decomposed densely;
/// larger ones go through the Lanczos solver using only matrix-vector
/// products.
pub fn adjacency_spectral_embedding<A: EmbeddingInput + ?Sized>(a: &A, sig: Signature) -> Result<Embedding> {
    let n = a.dim();
    let (p, q) = (sig.p, sig.q);
    if p + q > n {
        return Err(SpectralError::TooManyComponents { p, q, n });
    }
    let (top_vals, top_vecs, bottom_vals, bottom_vecs, norm, next_top, next_bottom) = if n <= DENSE_EIGEN_LIMIT {
        let dense = a.to_dense();
        let full = symmetric_eigen(&dense)?;
        let norm = full.values[0].abs().max(full.values[n - 1].abs());
        let top_vals = full.values[..p].to_vec();
        let top_vecs = full.vectors.select_columns(0, p);
        let bottom_vals: Vec<f64> = (0..q).map(|k| full.values[n - 1 - k]).collect();
        let mut bottom_vecs = DenseMatrix::zeros(n, q);
        for k in 0..q {
            bottom_vecs.set_column(k, &full.vectors.column(n - 1 - k));
        }
        let next_top = (p < n).then(|| full.values[p]);
        let next_bottom = (q < n).then(|| full.values[n - 1 - q]);
        (top_vals, top_vecs, bottom_vals, bottom_vecs, norm, next_top, next_bottom)
    } else {
        let pairs = extreme_eigenpairs(&AsOperator(a), p, q, &LanczosOptions::default())?;
        (
            pairs.top.values,
            pairs.top.vectors,
            pairs.bottom.values,
            pairs.bottom.vectors,
            pairs.norm_estimate,
            pairs.next_top,
            pairs.next_bottom,
        )
    };

    let threshold = DEGENERACY_THRESHOLD * norm;
    for &v in top_vals.iter().chain(&bottom_vals) {
        if v.abs() <= threshold {
            return Err(SpectralError::DegenerateSpectrum { value: v, threshold });
        }
    }
    if let Some(&v) = top_vals.iter().find(|&&v| v < 0.0) {
        return Err(SpectralError::WrongSign { value: v, block: "positive" });
    }
    if let Some(&v) = bottom_vals.iter().find(|&&v| v > 0.0) {
        return Err(SpectralError::WrongSign { value: v, block: "negative" });
    }

    let gap = TIE_THRESHOLD * norm;
    let tie_top = p > 0 && next_top.is_some_and(|next| (top_vals[p - 1] - next).abs() <= gap);
    let tie_bottom = q > 0 && next_bottom.is_some_and(|next| (bottom_vals[q - 1] - next).abs() <= gap);

    let frame = top_vecs.hstack(&bottom_vecs)?;
    let mut magnitudes = top_vals.clone();
    magnitudes.extend(bottom_vals.iter().map(|v| -v));
    let mut signed = top_vals;
    signed.extend(bottom_vals);
    let pair = SpectralPair::with_tolerance(frame, magnitudes, sig, EMBEDDING_ORTHONORMALITY_TOLERANCE)?;
    Ok(Embedding { pair, eigenvalue_signs: signed, tie_at_cutoff: tie_top || tie_bottom, input_norm: norm })
}

/// `Û Λ̂^{1/2}`.
pub fn latent_estimate(e: &Embedding) -> DenseMatrix {
    e.pair.latent_positions()
}
