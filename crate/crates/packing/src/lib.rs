//! Packing sets of spectral parameters `(U, Λ)` for minimax lower bounds on
//! two-to-infinity estimation error.
//!
//! Two constructions are provided:
//!
//! * **constant condition number** — a Hadamard-based base frame `U₀` whose
//!   rows are perturbed one at a time, `G_i = U₀ + e_i x_iᵀ`, with `U_i` the
//!   orthogonal polar factor of `G_i` computed from the closed-form
//!   rank-one SVD ([`rank_one_update_svd`]);
//! * **growing condition number** — a base frame with a short "heavy" block
//!   whose first row is swapped with a zero-tail row to form each member.
//!
//! [`verify_family`] certifies a constructed family numerically:
//! orthonormality, probability-matrix entry bounds, pairwise separation in
//! the aligned two-to-infinity distance, Frobenius budgets and exact KL
//! divergences against the Zhou bound.

mod certify;
mod constant;
mod divergence;
mod growing;
mod params;
mod signs;

use alignment::AlignmentError;
use matrixkit::MatrixError;
use netmodel::ModelError;
use thiserror::Error;

pub use certify::{
    verify_family, CertificationReport, CheckEntry, CheckKind, CheckResult, CheckStatus, PairSampling, VerifyOptions,
};
pub use constant::{build_base_frame_constant, build_packing_constant, perturbation_vector, rank_one_update_svd, RankOneSVD};
pub use divergence::{bernoulli_kl, exact_kl, zhou_bound, CompressedPair};
pub use growing::{build_base_frame_growing, build_packing_growing, growing_frame, GrowingBase};
pub use params::{
    default_zeta, hadamard_order, Derived, PackingFamily, PackingParams, Regime, ThresholdCheck, DEFAULT_C0,
    FRAME_TOLERANCE,
};
pub use signs::{balanced_sign_vector, EXHAUSTIVE_SIGN_LIMIT};

#[derive(Debug, Error)]
pub enum PackingError {
    #[error("invalid packing parameters: {0}")]
    InvalidParams(String),
    #[error("n = {n} is too small: need at least {needed} rows")]
    TooSmall { n: usize, needed: usize },
    #[error("cosine condition violated: |cos| = {cosine} is not below {bound} (n below the construction threshold)")]
    CosineUnattainable { cosine: f64, bound: f64 },
    #[error("perturbation norm {0} is not below 1")]
    PerturbationTooLarge(f64),
    #[error("perturbation and base row are linearly dependent (|cos| = {0})")]
    LinearlyDependent(f64),
    #[error("normalisation unsolvable: eta^2 = {0} <= 0 (parameters outside the regime)")]
    Unsolvable(f64),
    #[error("infinite divergence at entry ({i}, {j}): p = {p}, q = {q}")]
    InfiniteDivergence { i: usize, j: usize, p: f64, q: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
}

pub type Result<T> = std::result::Result<T, PackingError>;
