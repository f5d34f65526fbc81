//! Simulation model: growing-κ base frame with
//! `Λ₀ = diag(n/3, n/(3κ), …, n/(3κ))` and `P = ρ U₀ Λ₀^{1/2} I_{p,q} Λ₀^{1/2} U₀ᵀ`.

use netmodel::{probability_matrix, ProbabilityMatrix, Signature, SpectralPair};
use packing::{default_zeta, growing_frame};

use crate::Result;

/// Unscaled magnitudes `(n/3, n/(3κ), …, n/(3κ))`.
pub fn experiment_magnitudes(n: usize, kappa: f64, d: usize) -> Vec<f64> {
    let lambda1 = n as f64 / 3.0;
    (0..d).map(|j| if j == 0 { lambda1 } else { lambda1 / kappa }).collect()
}

/// The probability matrix and its exact spectral pair, whose magnitudes are
/// `ρ Λ₀` so that `P = U (ρΛ₀)^{1/2} I_{p,q} (ρΛ₀)^{1/2} Uᵀ`.
pub fn build_experiment_model(n: usize, rho: f64, kappa: f64, p: usize, q: usize) -> Result<(ProbabilityMatrix, SpectralPair)> {
    let sig = Signature::new(p, q)?;
    let d = sig.d();
    let lambdas = experiment_magnitudes(n, kappa, d);
    let base = growing_frame(n, &lambdas, default_zeta(d))?;
    // Scale λ₁ first and divide afterwards so that the condition number of
    // the pair is κ to the last bit.
    let top = rho * lambdas[0];
    let scaled: Vec<f64> = (0..d).map(|j| if j == 0 { top } else { top / kappa }).collect();
    let pair = SpectralPair::new(base.frame, scaled, sig)?;
    let pm = probability_matrix(&pair, 1.0)?;
    Ok((pm, pair))
}

/// `λ⋆ = ρ n/(3κ)`, the smallest nonzero eigenvalue magnitude of `P`.
pub fn lambda_star(n: usize, rho: f64, kappa: f64) -> f64 {
    rho * n as f64 / (3.0 * kappa)
}
