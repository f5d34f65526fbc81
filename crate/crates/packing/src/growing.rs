//! Growing-κ construction: a base frame with a short heavy block, members
//! obtained by swapping its first row into the zero tail.

use matrixkit::{hadamard, DenseMatrix};
use netmodel::SpectralPair;

use crate::params::{hadamard_order, Derived, PackingFamily, PackingParams, Regime, ThresholdCheck};
use crate::{PackingError, Result};

/// Base frame and the constants that define it.
#[derive(Debug, Clone)]
pub struct GrowingBase {
    pub frame: DenseMatrix,
    pub k0: u32,
    /// `M_d = ⌊n/2^{k₀+1}⌋`.
    pub m_d: usize,
    /// `β_d = ζ_d√(λ₁(λ_d∧log n)/n)`.
    pub beta_d: f64,
    /// Solved from `2^{k₀}(β_d²/λ_j² + (M_d−1)η_d²/n) = 1`.
    pub eta_d: f64,
}

/// Base frame with first column `1/√n`; for columns `j ≥ 2`, rows
/// `1..2^{k₀}` hold `β_d h_{i,j}/λ_j`, the next `2^{k₀}(M_d−1)` rows hold
/// `η_d h_{i mod 2^{k₀}, j}/√n`, and the remaining rows are zero.
pub fn build_base_frame_growing(params: &PackingParams) -> Result<GrowingBase> {
    params.validate()?;
    growing_frame(params.n, &params.lambdas(), params.zeta_d)
}

/// The growing-κ base frame for arbitrary magnitudes `λ₁ ≥ λ₂ = … = λ_d`,
/// without the packing-size preconditions (used by simulation models whose
/// condition number is below `3d`).
pub fn growing_frame(n: usize, lambdas: &[f64], zeta: f64) -> Result<GrowingBase> {
    let d = lambdas.len();
    if d == 0 {
        return Err(PackingError::InvalidParams("d must be at least 1".into()));
    }
    if !(zeta > 0.0) || lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(PackingError::InvalidParams(format!("zeta = {zeta}, magnitudes {lambdas:?} must be positive")));
    }
    let lambda_d = lambdas[d - 1];
    if lambdas[1..].iter().any(|l| *l != lambda_d) {
        return Err(PackingError::InvalidParams("trailing magnitudes must be equal".into()));
    }
    let k0 = hadamard_order(d);
    let block = 1usize << k0;
    let m_d = n / (2 * block);
    if m_d < 2 {
        return Err(PackingError::TooSmall { n, needed: 4 * block });
    }
    let nf = n as f64;
    let beta_d = zeta * (lambdas[0] * lambda_d.min(nf.ln()) / nf).sqrt();
    // Every λ_j (j ≥ 2) equals λ_d, so one η_d normalises all columns.
    let eta_sq = (1.0 / block as f64 - beta_d * beta_d / (lambda_d * lambda_d)) * nf / (m_d - 1) as f64;
    if !(eta_sq > 0.0) {
        return Err(PackingError::Unsolvable(eta_sq));
    }
    let eta_d = eta_sq.sqrt();
    let h = hadamard(k0)?;
    let first = 1.0 / nf.sqrt();
    let frame = DenseMatrix::from_fn(n, d, |i, j| {
        if j == 0 {
            first
        } else if i < block {
            beta_d * h.get(i, j) / lambdas[j]
        } else if i < block * m_d {
            eta_d * h.get(i % block, j) / nf.sqrt()
        } else {
            0.0
        }
    });
    Ok(GrowingBase { frame, k0, m_d, beta_d, eta_d })
}

/// Growing-κ packing family: `⌊n/2⌋` members, member `i` being the base
/// frame with rows `1` and `i + ⌊n/2⌋` (1-based) exchanged.
pub fn build_packing_growing(params: &PackingParams) -> Result<PackingFamily> {
    if params.regime != Regime::GrowingKappa {
        return Err(PackingError::InvalidParams("growing-kappa construction requires the GrowingKappa regime".into()));
    }
    let sig = params.signature()?;
    let gb = build_base_frame_growing(params)?;
    let n = params.n;
    let half = n / 2;
    let d = params.d();
    let members: Vec<DenseMatrix> = (1..=half)
        .map(|i| {
            let mut u = gb.frame.clone();
            let target = i + half - 1;
            for j in 0..d {
                let (a, b) = (u.get(0, j), u.get(target, j));
                u.set(0, j, b);
                u.set(target, j, a);
            }
            u
        })
        .collect();
    let block = 1usize << gb.k0;
    let thresholds = vec![
        ThresholdCheck { condition: "M_d >= 2".into(), holds: gb.m_d >= 2 },
        ThresholdCheck { condition: "swap targets lie in the zero tail (2^k0 M_d <= floor(n/2))".into(), holds: block * gb.m_d <= half },
        ThresholdCheck { condition: "kappa >= 3 d".into(), holds: params.kappa >= 3.0 * d as f64 },
    ];
    let base = SpectralPair::new(gb.frame, params.lambdas(), sig)?;
    Ok(PackingFamily {
        params: params.clone(),
        base,
        members,
        derived: Derived::Growing { k0: gb.k0, m_d: gb.m_d, beta_d: gb.beta_d, eta_d: gb.eta_d },
        perturbations: Vec::new(),
        thresholds,
    })
}
