//! Balanced sign vectors: `z` with `|z_ℓ| = 1/√d` and `|zᵀa| ≤ √(2/3)`.

use crate::{PackingError, Result};

/// Up to this dimension the search enumerates all `2^{d−1}` sign patterns;
/// above it a largest-first greedy partition is used.
pub const EXHAUSTIVE_SIGN_LIMIT: usize = 16;

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// For a unit vector `a` (`d ≥ 2`) return `z` with `z_ℓ = ±sign(a_ℓ)/√d`
/// splitting the magnitudes `|a_ℓ|` into two nearly balanced groups, so
/// that `|zᵀa| ≤ √(2/3)`.
///
/// For `d ≤ 16` the returned split is optimal (first minimiser in pattern
/// order, with coordinate 0 always on the positive side). The bound is
/// guaranteed to be attainable, so a violation panics.
pub fn balanced_sign_vector(a: &[f64]) -> Result<Vec<f64>> {
    let d = a.len();
    if d < 2 {
        return Err(PackingError::InvalidParams(format!("balanced sign vector needs d >= 2, got {d}")));
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(PackingError::InvalidParams(format!("input must be a unit vector, norm = {norm}")));
    }
    let mags: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    let side: Vec<f64> = if d <= EXHAUSTIVE_SIGN_LIMIT {
        let mut best = (f64::INFINITY, 0u32);
        for mask in 0..(1u32 << (d - 1)) {
            // Bit ℓ−1 of `mask` set means coordinate ℓ ≥ 1 sits on the negative side.
            let mut s = mags[0];
            for (l, m) in mags.iter().enumerate().skip(1) {
                s += if mask >> (l - 1) & 1 == 1 { -m } else { *m };
            }
            if s.abs() < best.0 {
                best = (s.abs(), mask);
            }
        }
        (0..d).map(|l| if l > 0 && best.1 >> (l - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect()
    } else {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| mags[j].total_cmp(&mags[i]).then(i.cmp(&j)));
        let mut side = vec![0.0; d];
        let (mut pos, mut neg) = (0.0, 0.0);
        for l in order {
            if pos <= neg {
                pos += mags[l];
                side[l] = 1.0;
            } else {
                neg += mags[l];
                side[l] = -1.0;
            }
        }
        side
    };
    let scale = 1.0 / (d as f64).sqrt();
    let z: Vec<f64> = (0..d).map(|l| side[l] * sign(a[l]) * scale).collect();
    let inner: f64 = z.iter().zip(a).map(|(x, y)| x * y).sum();
    assert!(
        inner.abs() <= (2.0f64 / 3.0).sqrt() + 1e-12,
        "balanced sign vector postcondition violated: |z^T a| = {inner}"
    );
    Ok(z)
}
