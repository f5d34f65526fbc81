//! Constant-κ construction: Hadamard base frame, per-row perturbations and
//! closed-form polar factors of `G_i = U₀ + e_i x_iᵀ`.

use matrixkit::{hadamard, DenseMatrix};
use netmodel::SpectralPair;
use rayon::prelude::*;

use crate::params::{hadamard_order, Derived, PackingFamily, PackingParams, Regime, ThresholdCheck};
use crate::signs::balanced_sign_vector;
use crate::{PackingError, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Base frame `U₀ ∈ ℝ^{n×d}`: first column `1/√n`; columns `2..d` are `m`
/// stacked copies of the first `d` columns of the Sylvester Hadamard matrix
/// `H_{2^{k₀}}`, scaled by `1/√(n−r)`; the last `r = n − 2^{k₀}m` rows are
/// zero beyond the first column.
///
/// Returns `(U₀, k₀, m, r)`.
pub fn build_base_frame_constant(n: usize, d: usize) -> Result<(DenseMatrix, u32, usize, usize)> {
    if d == 0 {
        return Err(PackingError::InvalidParams("d must be at least 1".into()));
    }
    let k0 = hadamard_order(d);
    let block = 1usize << k0;
    if n < block {
        return Err(PackingError::TooSmall { n, needed: block });
    }
    let m = n / block;
    let r = n - block * m;
    let h = hadamard(k0)?;
    let first = 1.0 / (n as f64).sqrt();
    let rest = 1.0 / ((n - r) as f64).sqrt();
    let u0 = DenseMatrix::from_fn(n, d, |i, j| {
        if j == 0 {
            first
        } else if i < block * m {
            h.get(i % block, j) * rest
        } else {
            0.0
        }
    });
    Ok((u0, k0, m, r))
}

/// Perturbation `x_i` for a base row `u_i`, with magnitudes
/// `|x_{i,ℓ}| = (c₀/λ_ℓ)√(λ₁(λ_d∧log n)/(nd))`, signs from a balanced sign
/// vector so that the angle to `u_i` stays bounded away from zero, and
/// orientation chosen so that `x_iᵀu_i ≥ 0`.
///
/// Fails if `|x_iᵀu_i|/(‖x_i‖‖u_i‖) ≥ √3/2`, which signals that `n` is below
/// the construction's threshold.
pub fn perturbation_vector(u: &[f64], lambdas: &[f64], c0: f64, n: usize) -> Result<Vec<f64>> {
    let d = u.len();
    if lambdas.len() != d {
        return Err(PackingError::Shape(format!("{} eigenvalues for a row of length {d}", lambdas.len())));
    }
    if !(c0 > 0.0) {
        return Err(PackingError::InvalidParams(format!("c0 = {c0} must be positive")));
    }
    let (l1, ld) = (lambdas[0], lambdas[d - 1]);
    let scale = c0 * (l1 * ld.min((n as f64).ln()) / (n as f64 * d as f64)).sqrt();
    let y: Vec<f64> = lambdas.iter().map(|l| scale / l).collect();
    let bound = 3f64.sqrt() / 2.0;
    if d < 2 {
        // A single coordinate is always parallel to u_i.
        return Err(PackingError::CosineUnattainable { cosine: 1.0, bound });
    }
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a: Vec<f64> = (0..d).map(|l| if u[l] < 0.0 { -y[l] } else { y[l] } / ny).collect();
    let z = balanced_sign_vector(&a)?;
    let mut x: Vec<f64> = (0..d).map(|l| if z[l] < 0.0 { -y[l] } else { y[l] }).collect();
    if dot(&x, u) < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let nu = dot(u, u).sqrt();
    let cosine = dot(&x, u) / (ny * nu);
    if !(cosine.abs() < bound) {
        return Err(PackingError::CosineUnattainable { cosine: cosine.abs(), bound });
    }
    Ok(x)
}

/// Closed-form SVD data of `G_i = U₀ + e_i x_iᵀ`.
///
/// `GᵀG = I + x uᵀ + u xᵀ + x xᵀ` acts as the identity off `span{x, u}`;
/// on that plane its eigenvectors are `α_± x + u` with eigenvalues
/// `1 + σ̃_±`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSVD {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// `√(1 + σ̃_±) − 1`.
    pub d_plus: f64,
    pub d_minus: f64,
    /// Rows: unit right singular vectors for `√(1+σ̃_+)` and `√(1+σ̃_−)`.
    pub v_span: DenseMatrix,
}

impl RankOneSVD {
    /// Singular values of `G_i` in the order `(√(1+σ̃_+), √(1+σ̃_−), 1, …, 1)`.
    pub fn singular_values(&self, d: usize) -> Vec<f64> {
        let mut s = vec![1.0; d];
        s[0] = 1.0 + self.d_plus;
        if d > 1 {
            s[1] = 1.0 + self.d_minus;
        }
        s
    }

    /// `(GᵀG)^{−1/2} = I + Σ_± ((1+σ̃_±)^{−1/2} − 1) v_± v_±ᵀ`.
    pub fn inverse_sqrt_gram(&self) -> DenseMatrix {
        let d = self.v_span.cols();
        let mut c = DenseMatrix::identity(d);
        for (k, dk) in [self.d_plus, self.d_minus].into_iter().enumerate() {
            // (1+σ)^{−1/2} − 1 = −d/(1+d) with d = √(1+σ) − 1.
            let w = -dk / (1.0 + dk);
            let v = self.v_span.row(k);
            for a in 0..d {
                for b in 0..d {
                    c.set(a, b, c.get(a, b) + w * v[a] * v[b]);
                }
            }
        }
        c
    }

    /// Orthogonal polar factor `U_i = Ũ_iṼ_iᵀ = G_i (G_iᵀG_i)^{−1/2}`.
    pub fn polar_factor(&self, u0: &DenseMatrix, row: usize, x: &[f64]) -> Result<DenseMatrix> {
        let mut g = u0.clone();
        g.row_mut(row).iter_mut().zip(x).for_each(|(a, b)| *a += b);
        Ok(g.matmul(&self.inverse_sqrt_gram())?)
    }
}

/// Closed-form singular structure of `G_i = U₀ + e_i x_iᵀ`:
/// `α_± = 1/2 ± (1/2)√(1 + (4‖u_i‖² + 4x_iᵀu_i)/‖x_i‖²)` and
/// `σ̃_± = x_iᵀu_i + α_±‖x_i‖²`.
///
/// `α_−` and `σ̃_−` are evaluated through the root products
/// `α_+α_− = −(‖u‖² + xᵀu)/‖x‖²` and `σ̃_+σ̃_− = (xᵀu)² − ‖x‖²‖u‖²`, which
/// avoids cancellation when `‖x‖` is small.
pub fn rank_one_update_svd(u0: &DenseMatrix, row: usize, x: &[f64]) -> Result<RankOneSVD> {
    let d = u0.cols();
    if x.len() != d || row >= u0.rows() {
        return Err(PackingError::Shape(format!("row {row} / vector of length {} for a {:?} frame", x.len(), u0.shape())));
    }
    let u = u0.row(row);
    let xx = dot(x, x);
    let xu = dot(x, u);
    let uu = dot(u, u);
    let nx = xx.sqrt();
    if !(nx < 1.0) {
        return Err(PackingError::PerturbationTooLarge(nx));
    }
    let cosine = if nx > 0.0 && uu > 0.0 { xu / (nx * uu.sqrt()) } else { 1.0 };
    if !(cosine.abs() < 1.0 - 1e-12) {
        return Err(PackingError::LinearlyDependent(cosine.abs()));
    }
    let root = (1.0 + (4.0 * uu + 4.0 * xu) / xx).sqrt();
    let alpha_plus = 0.5 + 0.5 * root;
    let alpha_minus = -(uu + xu) / (xx * alpha_plus);
    let sigma_plus = xu + alpha_plus * xx;
    let sigma_minus = (xu * xu - xx * uu) / sigma_plus;
    // √(1+σ) − 1 = σ/(√(1+σ) + 1).
    let d_plus = sigma_plus / ((1.0 + sigma_plus).sqrt() + 1.0);
    let d_minus = sigma_minus / ((1.0 + sigma_minus).sqrt() + 1.0);
    let mut v_span = DenseMatrix::zeros(2, d);
    for (k, alpha) in [alpha_plus, alpha_minus].into_iter().enumerate() {
        let w: Vec<f64> = (0..d).map(|l| alpha * x[l] + u[l]).collect();
        let nw = dot(&w, &w).sqrt();
        v_span.row_mut(k).iter_mut().zip(&w).for_each(|(dst, v)| *dst = v / nw);
    }
    Ok(RankOneSVD { sigma_plus, sigma_minus, alpha_plus, alpha_minus, d_plus, d_minus, v_span })
}

/// Constant-κ packing family: `Λ = diag(λ₁, λ₁/κ, …, λ₁/κ)` and, for each
/// of the first `2^{k₀}m` rows, the polar factor of `U₀ + e_i x_iᵀ`.
pub fn build_packing_constant(params: &PackingParams) -> Result<PackingFamily> {
    params.validate()?;
    if params.regime != Regime::ConstantKappa {
        return Err(PackingError::InvalidParams("constant-kappa construction requires the ConstantKappa regime".into()));
    }
    let sig = params.signature()?;
    let (n, d) = (params.n, params.d());
    let (u0, k0, m, r) = build_base_frame_constant(n, d)?;
    let lambdas = params.lambdas();
    let count = (1usize << k0) * m;
    let built: Vec<(Vec<f64>, DenseMatrix)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let x = perturbation_vector(u0.row(i), &lambdas, params.c0, n)?;
            let svd = rank_one_update_svd(&u0, i, &x)?;
            let member = svd.polar_factor(&u0, i, &x)?;
            Ok((x, member))
        })
        .collect::<Result<_>>()?;
    let (perturbations, members): (Vec<_>, Vec<_>) = built.into_iter().unzip();

    let max_x = perturbations.iter().map(|x| dot(x, x).sqrt()).fold(0.0, f64::max);
    let (nf, df, c0, kappa) = (n as f64, d as f64, params.c0, params.kappa);
    let thresholds = vec![
        ThresholdCheck { condition: "n >= 42 d (cosine bound)".into(), holds: n >= 42 * d },
        ThresholdCheck { condition: "n >= 4 d >= 2 r".into(), holds: n >= 4 * d && 4 * d >= 2 * r },
        ThresholdCheck { condition: "max ||x_i||_2 < 1/2".into(), holds: max_x < 0.5 },
        ThresholdCheck {
            condition: "n >= 904 d + 4 c0 sqrt(kappa d) + 900 c0^2 kappa (Frobenius bound)".into(),
            holds: nf >= 904.0 * df + 4.0 * c0 * (kappa * df).sqrt() + 900.0 * c0 * c0 * kappa,
        },
    ];
    let base = SpectralPair::new(u0, lambdas, sig)?;
    Ok(PackingFamily {
        params: params.clone(),
        base,
        members,
        derived: Derived::Constant { k0, m, r },
        perturbations,
        thresholds,
    })
}
