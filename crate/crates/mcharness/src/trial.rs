//! One Monte Carlo trial: sample, embed, align, measure.

use alignment::block_procrustes;
use matrixkit::two_to_infinity_norm;
use netmodel::{sample_adjacency_trial, DiagonalMode, ProbabilityMatrix, SpectralPair};
use serde::{Deserialize, Serialize};
use spectral::{adjacency_spectral_embedding, latent_estimate, EmbeddingInput};

use crate::Result;

/// Errors of a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub rho: f64,
    pub kappa: f64,
    pub trial_index: u64,
    /// `‖Û Λ̂^{1/2} W₁ − U₀ Λ₀^{1/2}‖_{2,∞}`.
    pub latent_error: f64,
    /// `‖Û W₂ − U₀‖_{2,∞}`.
    pub subspace_error: f64,
}

/// Latent-position and subspace errors of the embedding of `input` against
/// `truth`, each aligned by its own block Procrustes rotation.
pub fn estimation_errors<A: EmbeddingInput + ?Sized>(input: &A, truth: &SpectralPair) -> Result<(f64, f64)> {
    let sig = truth.signature();
    let emb = adjacency_spectral_embedding(input, sig)?;
    let xhat = latent_estimate(&emb);
    let x = truth.latent_positions();
    let w1 = block_procrustes(&xhat, &x, sig)?;
    let latent = two_to_infinity_norm(&w1.apply(&xhat)?.sub(&x)?);
    let (uhat, u) = (emb.frame(), truth.frame());
    let w2 = block_procrustes(uhat, u, sig)?;
    let subspace = two_to_infinity_norm(&w2.apply(uhat)?.sub(u)?);
    Ok((latent, subspace))
}

/// Trial `trial_index` of the cell seeded by `seed`: sample `A ~ P₀`, embed
/// with the truth's signature and measure both errors.
pub fn run_trial(
    p0: &ProbabilityMatrix,
    truth: &SpectralPair,
    rho: f64,
    kappa: f64,
    seed: u64,
    trial_index: u64,
    mode: DiagonalMode,
) -> Result<TrialRecord> {
    let adj = sample_adjacency_trial(p0, seed, trial_index, mode);
    let (latent_error, subspace_error) = estimation_errors(&adj, truth)?;
    Ok(TrialRecord { n: p0.n(), rho, kappa, trial_index, latent_error, subspace_error })
}
