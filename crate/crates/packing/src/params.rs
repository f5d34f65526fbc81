//! Parameters, derived quantities and the family container.

use matrixkit::DenseMatrix;
use netmodel::{Signature, SpectralPair};
use serde::{Deserialize, Serialize};

use crate::{PackingError, Result};

/// Default perturbation constant for the constant-κ construction. It has to
/// be small enough that every member keeps its probabilities inside (0, 1).
pub const DEFAULT_C0: f64 = 0.02;

/// Orthonormality tolerance for base and member frames.
pub const FRAME_TOLERANCE: f64 = 1e-10;

/// Relative slack when comparing parameters against their caps, so that
/// e.g. `λ₁ = n/3` computed in floating point is accepted.
const CAP_SLACK: f64 = 1e-12;

/// Largest admissible `ζ_d`, `1/√(640 d)`, used as the default.
pub fn default_zeta(d: usize) -> f64 {
    1.0 / (640.0 * d as f64).sqrt()
}

/// `k₀` with `2^{k₀−1} < d ≤ 2^{k₀}` (and `k₀ = 0` for `d = 1`).
pub fn hadamard_order(d: usize) -> u32 {
    d.max(1).next_power_of_two().trailing_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    ConstantKappa,
    GrowingKappa,
}

/// Inputs to either construction. `λ_j = λ₁/κ` for every `j ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingParams {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub kappa: f64,
    pub lambda1: f64,
    /// Perturbation constant (constant-κ regime only).
    pub c0: f64,
    /// Heavy-block scale (growing-κ regime only).
    pub zeta_d: f64,
    pub regime: Regime,
}

impl PackingParams {
    pub fn constant(n: usize, p: usize, q: usize, kappa: f64, lambda1: f64, c0: f64) -> Self {
        Self { n, p, q, kappa, lambda1, c0, zeta_d: default_zeta(p + q), regime: Regime::ConstantKappa }
    }

    pub fn growing(n: usize, p: usize, q: usize, kappa: f64, lambda1: f64, zeta_d: f64) -> Self {
        Self { n, p, q, kappa, lambda1, c0: DEFAULT_C0, zeta_d, regime: Regime::GrowingKappa }
    }

    pub fn d(&self) -> usize {
        self.p + self.q
    }

    pub fn signature(&self) -> Result<Signature> {
        Signature::new(self.p, self.q).map_err(PackingError::from)
    }

    /// `λ_d = λ₁/κ`.
    pub fn lambda_d(&self) -> f64 {
        self.lambda1 / self.kappa
    }

    /// `(λ₁, λ₁/κ, …, λ₁/κ)`.
    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.d()).map(|j| if j == 0 { self.lambda1 } else { self.lambda_d() }).collect()
    }

    /// `λ_d ∧ log n` (natural logarithm).
    pub fn log_term(&self) -> f64 {
        self.lambda_d().min((self.n as f64).ln())
    }

    /// Check the regime constraints: `p ≥ 1`, `κ ≥ 3d`, `3κλ_d ≤ n`
    /// (equivalently `λ₁ ≤ n/3`), and `c₀ > 0` or `0 < ζ_d ≤ 1/√(640d)`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PackingError::InvalidParams(msg));
        let d = self.d();
        if self.p == 0 {
            return bad("the leading eigenvalue must be positive, so p >= 1".into());
        }
        if !(self.kappa.is_finite() && self.kappa >= 1.0) {
            return bad(format!("kappa = {} must be a finite number >= 1", self.kappa));
        }
        if self.kappa < 3.0 * d as f64 {
            return bad(format!("kappa = {} is below 3d = {}", self.kappa, 3 * d));
        }
        if !(self.lambda1.is_finite() && self.lambda1 > 0.0) {
            return bad(format!("lambda1 = {} must be positive", self.lambda1));
        }
        let n = self.n as f64;
        if 3.0 * self.kappa * self.lambda_d() > n * (1.0 + CAP_SLACK) {
            return bad(format!("3 kappa lambda_d = {} exceeds n = {}", 3.0 * self.kappa * self.lambda_d(), self.n));
        }
        if self.lambda1 > n / 3.0 * (1.0 + CAP_SLACK) {
            return bad(format!("lambda1 = {} exceeds n/3 = {}", self.lambda1, n / 3.0));
        }
        match self.regime {
            Regime::ConstantKappa => {
                if !(self.c0.is_finite() && self.c0 > 0.0) {
                    return bad(format!("c0 = {} must be positive", self.c0));
                }
            }
            Regime::GrowingKappa => {
                let cap = default_zeta(d);
                if !(self.zeta_d.is_finite() && self.zeta_d > 0.0) {
                    return bad(format!("zeta_d = {} must be positive", self.zeta_d));
                }
                if self.zeta_d > cap * (1.0 + CAP_SLACK) {
                    return bad(format!("zeta_d = {} exceeds 1/sqrt(640 d) = {cap}", self.zeta_d));
                }
            }
        }
        Ok(())
    }

    /// Regime lower bound on the pairwise aligned two-to-infinity distance:
    /// `(c₀/8)√(κ(λ_d∧log n)/n)` (constant κ) or
    /// `(ζ_d√(d−1)/2)√(κ(λ_d∧log n)/n)` (growing κ).
    pub fn separation_bound(&self) -> f64 {
        let scale = (self.kappa * self.log_term() / self.n as f64).sqrt();
        match self.regime {
            Regime::ConstantKappa => self.c0 / 8.0 * scale,
            Regime::GrowingKappa => self.zeta_d * ((self.d() - 1) as f64).sqrt() / 2.0 * scale,
        }
    }

    /// Regime budget for `‖P_i − P₀‖²_F`: `λ₁(λ_d∧log n)/(90n)` or
    /// `λ₁(λ_d∧log n)/(80n)`.
    pub fn frobenius_budget(&self) -> f64 {
        let base = self.lambda1 * self.log_term() / self.n as f64;
        match self.regime {
            Regime::ConstantKappa => base / 90.0,
            Regime::GrowingKappa => base / 80.0,
        }
    }

    /// Regime budget for `KL(P_i ‖ P₀)`: `(1/10) log n` or `(9/80) log n`.
    pub fn kl_budget(&self) -> f64 {
        let ln = (self.n as f64).ln();
        match self.regime {
            Regime::ConstantKappa => ln / 10.0,
            Regime::GrowingKappa => 9.0 * ln / 80.0,
        }
    }
}

/// Quantities fixed by the construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Derived {
    Constant { k0: u32, m: usize, r: usize },
    Growing { k0: u32, m_d: usize, beta_d: f64, eta_d: f64 },
}

/// One of the explicit "for n sufficiently large" inequalities the
/// construction relies on, and whether it holds for these parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub condition: String,
    pub holds: bool,
}

/// Base parameter plus members. Member `k` (0-based in `members`) is the
/// packing element with index `k + 1`; index 0 denotes the base.
#[derive(Debug, Clone)]
pub struct PackingFamily {
    pub params: PackingParams,
    pub base: SpectralPair,
    pub members: Vec<DenseMatrix>,
    pub derived: Derived,
    /// Perturbation vectors `x_i` (constant regime; empty otherwise).
    pub perturbations: Vec<Vec<f64>>,
    pub thresholds: Vec<ThresholdCheck>,
}

impl PackingFamily {
    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    /// Frame with packing index `idx` (0 = base).
    pub fn frame(&self, idx: usize) -> &DenseMatrix {
        if idx == 0 {
            self.base.frame()
        } else {
            &self.members[idx - 1]
        }
    }

    /// Diagonal of `Λ̃ = Λ^{1/2} I_{p,q} Λ^{1/2}`.
    pub fn signed_lambdas(&self) -> Vec<f64> {
        self.base.signed_eigenvalues()
    }

    /// Latent positions `U_idx Λ^{1/2}`.
    pub fn latent_positions(&self, idx: usize) -> DenseMatrix {
        let roots: Vec<f64> = self.base.magnitudes().iter().map(|l| l.sqrt()).collect();
        self.frame(idx).scale_columns(&roots)
    }

    /// Dense `U_idx Λ̃ U_idxᵀ`.
    pub fn probability_entries(&self, idx: usize) -> DenseMatrix {
        let u = self.frame(idx);
        let mut p = u.scale_columns(&self.signed_lambdas()).matmul(&u.transpose()).expect("conformable");
        p.symmetrize();
        p
    }
}
