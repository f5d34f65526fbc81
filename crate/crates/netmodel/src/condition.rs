use std::f64::consts::PI;

use matrixkit::{symmetric_eigen, DenseMatrix};

use crate::{ModelError, Result, Signature};

/// Interval in which the empirical condition number is expected to fall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionWindow {
    /// Concentration radius `4√(log d/n) + 8 log d/(3n)`.
    pub delta: f64,
    /// Half-width applied to the extreme eigenvalues (equals `delta` when
    /// `q = 0`, `3√(δ/‖Δ‖)·‖Δ‖` otherwise).
    pub correction: f64,
    /// Population condition number at the window's centre.
    pub center: f64,
    pub kappa_low: f64,
    pub kappa_high: f64,
}

impl ConditionWindow {
    pub fn contains(&self, kappa: f64) -> bool {
        kappa >= self.kappa_low && kappa <= self.kappa_high
    }
}

/// Extreme eigenvalue magnitudes of `Δ^{1/2} I_{p,q} Δ^{1/2}`, which shares
/// its spectrum with `I_{p,q} Δ`. Returns `(largest, smallest)`.
fn indefinite_extremes(delta: &DenseMatrix, sig: Signature) -> Result<(f64, f64)> {
    let d = sig.d();
    if delta.rows() != d || delta.cols() != d {
        return Err(ModelError::InvalidArgument(format!("second-moment matrix must be {d}×{d}")));
    }
    let eig = symmetric_eigen(delta)?;
    let largest = eig.values[0];
    let smallest = eig.values[d - 1];
    if !(largest > 0.0) || smallest <= 1e-12 * largest {
        return Err(ModelError::RankDeficient(smallest));
    }
    if sig.q == 0 {
        return Ok((largest, smallest));
    }
    // Δ^{1/2} = V diag(√μ) Vᵀ; then S = Δ^{1/2} I Δ^{1/2}.
    let roots: Vec<f64> = eig.values.iter().map(|m| m.sqrt()).collect();
    let half = eig.vectors.scale_columns(&roots).matmul(&eig.vectors.transpose())?;
    let signs: Vec<f64> = (0..d).map(|j| sig.sign(j)).collect();
    let mut s = half.scale_columns(&signs).matmul(&half)?;
    s.symmetrize();
    let spec = symmetric_eigen(&s)?;
    let mags: Vec<f64> = spec.values.iter().map(|v| v.abs()).collect();
    let hi = mags.iter().cloned().fold(0.0, f64::max);
    let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((hi, lo))
}

/// `κ` of the indefinite form: `max|λ(I_{p,q} Δ)| / min|λ(I_{p,q} Δ)|`.
pub fn indefinite_condition_number(delta: &DenseMatrix, sig: Signature) -> Result<f64> {
    let (hi, lo) = indefinite_extremes(delta, sig)?;
    Ok(hi / lo)
}

/// Condition number of `P = X I_{p,q} Xᵀ` computed from the `d × d` matrix
/// `I_{p,q} XᵀX/n`, with eigenvalues ordered by magnitude.
pub fn empirical_condition_number(x: &DenseMatrix, sig: Signature) -> Result<f64> {
    if x.cols() != sig.d() || x.rows() == 0 {
        return Err(ModelError::InvalidArgument(format!(
            "latent matrix is {}×{}, signature needs {} columns",
            x.rows(),
            x.cols(),
            sig.d()
        )));
    }
    let mut gram = x.t_matmul(x)?.scale(1.0 / x.rows() as f64);
    gram.symmetrize();
    indefinite_condition_number(&gram, sig)
}

/// Window around `κ(I_{p,q}Δ)` for an `n`-sample empirical condition number.
///
/// With `q = 0` the extreme eigenvalues of `Δ` move by at most
/// `δ = 4√(log d/n) + 8 log d/(3n)`. With `q > 0` the relative deviation
/// `δ/‖Δ‖` must lie below 1 and the extremes of `I_{p,q}Δ` move by at most
/// `3√(δ/‖Δ‖)·‖Δ‖`. The window is undefined (an error) when the smaller
/// extreme does not exceed the correction.
pub fn condition_window(delta: &DenseMatrix, n: usize, sig: Signature) -> Result<ConditionWindow> {
    if n < 2 {
        return Err(ModelError::InvalidArgument("condition window needs n >= 2".into()));
    }
    let d = sig.d();
    let nf = n as f64;
    let ld = (d as f64).ln();
    let dev = 4.0 * (ld / nf).sqrt() + 8.0 * ld / (3.0 * nf);
    let (hi, lo) = indefinite_extremes(delta, sig)?;
    let correction = if sig.q == 0 {
        dev
    } else {
        let norm = symmetric_eigen(delta)?.values[0];
        let rel = dev / norm;
        if rel >= 1.0 {
            return Err(ModelError::WindowUndefined { lower: lo, deviation: 3.0 * rel.sqrt() * norm });
        }
        3.0 * rel.sqrt() * norm
    };
    if lo <= correction {
        return Err(ModelError::WindowUndefined { lower: lo, deviation: correction });
    }
    Ok(ConditionWindow {
        delta: dev,
        correction,
        center: hi / lo,
        kappa_low: (hi - correction) / (lo + correction),
        kappa_high: (hi + correction) / (lo - correction),
    })
}

/// Second-moment matrix of iid uniform `[0, 1/√d]` coordinates:
/// `(1/(12d)) I + μμᵀ` with `μ = 1/(2√d)·1`.
pub fn uniform_cube_delta(d: usize) -> DenseMatrix {
    let df = d as f64;
    DenseMatrix::from_fn(d, d, |i, j| 1.0 / (4.0 * df) + if i == j { 1.0 / (12.0 * df) } else { 0.0 })
}

/// Second-moment matrix of the uniform distribution on the positive orthant
/// of the unit ball: `(1/(d+2)) ((1 − 2/π) I + (2/π) 11ᵀ)`.
pub fn ball_orthant_delta(d: usize) -> DenseMatrix {
    let c = 1.0 / (d as f64 + 2.0);
    DenseMatrix::from_fn(d, d, |i, j| c * (2.0 / PI + if i == j { 1.0 - 2.0 / PI } else { 0.0 }))
}

/// Closed form `(2d + π − 2)/(π − 2)` of the orthant condition number.
pub fn ball_orthant_kappa_closed_form(d: usize) -> f64 {
    (2.0 * d as f64 + PI - 2.0) / (PI - 2.0)
}

/// Second-moment matrix of [`crate::sample_latent_grdpg_intervals`]:
/// block means `3/(4√p)` and `1/(4√q)`, variances `1/(48p)` and `1/(48q)`.
pub fn grdpg_interval_delta(p: usize, q: usize) -> DenseMatrix {
    let d = p + q;
    let (pf, qf) = (p as f64, q as f64);
    let mean: Vec<f64> = (0..d).map(|j| if j < p { 0.75 / pf.sqrt() } else { 0.25 / qf.sqrt() }).collect();
    let var: Vec<f64> = (0..d).map(|j| if j < p { 1.0 / (48.0 * pf) } else { 1.0 / (48.0 * qf) }).collect();
    DenseMatrix::from_fn(d, d, |i, j| mean[i] * mean[j] + if i == j { var[i] } else { 0.0 })
}
