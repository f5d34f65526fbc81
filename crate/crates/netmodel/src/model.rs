use matrixkit::{signature_matrix, DenseMatrix};

use crate::{ModelError, Result, INVALID_TOLERANCE};

/// Signature `(p, q)`: counts of positive and negative eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(ModelError::InvalidSignature { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn d(&self) -> usize {
        self.p + self.q
    }

    /// `+1` for the first `p` coordinates, `−1` after.
    pub fn sign(&self, j: usize) -> f64 {
        if j < self.p {
            1.0
        } else {
            -1.0
        }
    }

    pub fn matrix(&self) -> DenseMatrix {
        signature_matrix(self.p, self.q)
    }
}

/// Orthonormal frame `U`, positive magnitudes `Λ` and a signature: the
/// canonical description of a rank-`d` probability matrix.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    frame: DenseMatrix,
    magnitudes: Vec<f64>,
    signature: Signature,
}

impl SpectralPair {
    /// Validate with the default orthonormality tolerance `1e-10`.
    pub fn new(frame: DenseMatrix, magnitudes: Vec<f64>, signature: Signature) -> Result<Self> {
        Self::with_tolerance(frame, magnitudes, signature, 1e-10)
    }

    pub fn with_tolerance(frame: DenseMatrix, magnitudes: Vec<f64>, signature: Signature, tol: f64) -> Result<Self> {
        let d = signature.d();
        if frame.cols() != d || magnitudes.len() != d {
            return Err(ModelError::InvalidPair(format!(
                "frame has {} columns and {} magnitudes for d = {d}",
                frame.cols(),
                magnitudes.len()
            )));
        }
        if let Some(bad) = magnitudes.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(ModelError::InvalidPair(format!("magnitude {bad} is not positive")));
        }
        let defect = frame.orthonormality_defect();
        if defect > tol {
            return Err(ModelError::InvalidPair(format!("frame orthonormality defect {defect:e} exceeds {tol:e}")));
        }
        Ok(Self { frame, magnitudes, signature })
    }

    pub fn frame(&self) -> &DenseMatrix {
        &self.frame
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn n(&self) -> usize {
        self.frame.rows()
    }

    pub fn d(&self) -> usize {
        self.signature.d()
    }

    /// Canonical latent positions `X = U Λ^{1/2}`.
    pub fn latent_positions(&self) -> DenseMatrix {
        let roots: Vec<f64> = self.magnitudes.iter().map(|l| l.sqrt()).collect();
        self.frame.scale_columns(&roots)
    }

    /// Signed eigenvalues `Λ^{1/2} I_{p,q} Λ^{1/2}` on the diagonal.
    pub fn signed_eigenvalues(&self) -> Vec<f64> {
        self.magnitudes.iter().enumerate().map(|(j, l)| self.signature.sign(j) * l).collect()
    }

    /// Condition number `λ_max / λ_min` of the magnitudes.
    pub fn condition_number(&self) -> f64 {
        let max = self.magnitudes.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.magnitudes.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Symmetric edge-probability matrix with entries in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct ProbabilityMatrix {
    entries: DenseMatrix,
    sparsity: f64,
}

impl ProbabilityMatrix {
    /// Validate a symmetric matrix as a probability matrix. Entries outside
    /// `[0, 1]` by at most `1e-9` are clamped (rounding dust is expected up to
    /// `1e-12`); anything beyond `1e-9` is an error naming the entry.
    pub fn from_matrix(mut entries: DenseMatrix, sparsity: f64) -> Result<Self> {
        if !(sparsity > 0.0 && sparsity <= 1.0) {
            return Err(ModelError::InvalidSparsity(sparsity));
        }
        entries.check_symmetric(matrixkit::SYMMETRY_TOLERANCE)?;
        entries.symmetrize();
        let n = entries.cols();
        let mut worst: Option<(usize, usize, f64, f64)> = None;
        for (k, v) in entries.data_mut().iter_mut().enumerate() {
            let excess = (-*v).max(*v - 1.0);
            if excess > INVALID_TOLERANCE && worst.is_none_or(|w| excess > w.3) {
                worst = Some((k / n, k % n, *v, excess));
            }
            if excess > 0.0 {
                // Dust from rounding; genuine violations were recorded above.
                *v = v.clamp(0.0, 1.0);
            }
        }
        if let Some((i, j, value, _)) = worst {
            return Err(ModelError::InvalidModel { i, j, value });
        }
        Ok(Self { entries, sparsity })
    }

    pub fn entries(&self) -> &DenseMatrix {
        &self.entries
    }

    pub fn sparsity(&self) -> f64 {
        self.sparsity
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    /// Smallest and largest entry, optionally excluding the diagonal.
    pub fn entry_range(&self, include_diagonal: bool) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                if i == j && !include_diagonal {
                    continue;
                }
                let v = self.entries.get(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}

/// `P = ρ · U Λ^{1/2} I_{p,q} Λ^{1/2} Uᵀ`, symmetrised exactly and validated.
pub fn probability_matrix(pair: &SpectralPair, rho: f64) -> Result<ProbabilityMatrix> {
    if !(rho > 0.0 && rho <= 1.0) || rho < f64::MIN_POSITIVE * 1e10 {
        return Err(ModelError::InvalidSparsity(rho));
    }
    let u = pair.frame();
    let w: Vec<f64> = pair.signed_eigenvalues().iter().map(|l| rho * l).collect();
    let n = u.rows();
    let d = u.cols();
    let mut p = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let ui = u.row(i);
        let scaled: Vec<f64> = (0..d).map(|k| ui[k] * w[k]).collect();
        for j in i..n {
            let uj = u.row(j);
            let v: f64 = scaled.iter().zip(uj).map(|(a, b)| a * b).sum();
            p.set(i, j, v);
            p.set(j, i, v);
        }
    }
    ProbabilityMatrix::from_matrix(p, rho)
}
