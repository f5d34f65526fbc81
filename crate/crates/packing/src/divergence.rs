//! KL divergence between independent-edge network distributions and the
//! quadratic upper bound `‖P − Q‖²_F / (a(1 − b))`.

use std::collections::HashMap;

use matrixkit::DenseMatrix;
use netmodel::ProbabilityMatrix;
use rayon::prelude::*;

use crate::{PackingError, Result};

/// `KL(Bern(p) ‖ Bern(q))` with `0·log 0 = 0`; `None` when the divergence is
/// infinite (`q ∈ {0, 1}` and `p ≠ q`).
pub fn bernoulli_kl(p: f64, q: f64) -> Option<f64> {
    if p == q {
        return Some(0.0);
    }
    if !(q > 0.0 && q < 1.0) {
        return None;
    }
    // log1p keeps full relative accuracy when p ≈ q.
    let hit = if p == 0.0 { 0.0 } else { p * ((p - q) / q).ln_1p() };
    let miss = if p == 1.0 { 0.0 } else { (1.0 - p) * ((q - p) / (1.0 - q)).ln_1p() };
    Some(hit + miss)
}

/// `Σ_{i<j} KL(Bern(P_ij) ‖ Bern(Q_ij))`: the divergence between the two
/// independent-edge distributions over simple graphs.
pub fn exact_kl(p: &ProbabilityMatrix, q: &ProbabilityMatrix) -> Result<f64> {
    let n = p.n();
    if q.n() != n {
        return Err(PackingError::Shape(format!("n = {n} vs n = {}", q.n())));
    }
    let rows: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in i + 1..n {
                let (pij, qij) = (p.get(i, j), q.get(i, j));
                acc += bernoulli_kl(pij, qij).ok_or(PackingError::InfiniteDivergence { i, j, p: pij, q: qij })?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r?;
    }
    Ok(total)
}

/// `‖P − Q‖²_F / (a(1 − b))` with `a = min Q`, `b = max Q` (diagonal
/// included or not). Infinite when `Q` touches 0 or 1.
pub fn zhou_bound(p: &ProbabilityMatrix, q: &ProbabilityMatrix, include_diagonal: bool) -> Result<f64> {
    if q.n() != p.n() {
        return Err(PackingError::Shape(format!("n = {} vs n = {}", p.n(), q.n())));
    }
    let frob_sq = p.entries().sub(q.entries())?.frobenius_norm().powi(2);
    let (a, b) = q.entry_range(include_diagonal);
    Ok(quadratic_bound(frob_sq, a, b))
}

fn quadratic_bound(frob_sq: f64, a: f64, b: f64) -> f64 {
    if a > 0.0 && b < 1.0 {
        frob_sq / (a * (1.0 - b))
    } else {
        f64::INFINITY
    }
}

/// Equivalence class of row indices sharing the same `(a_i, b_i)` rows.
#[derive(Debug, Clone)]
struct RowClass {
    a: Vec<f64>,
    b: Vec<f64>,
    count: usize,
    first: usize,
    second: Option<usize>,
}

/// Two frames `A`, `B` compressed to their distinct row pairs, so that
/// entrywise functionals of `P_A = AΛ̃Aᵀ` and `P_B = BΛ̃Bᵀ` cost
/// `O(classes²)` instead of `O(n²)`. Packing frames have only a handful of
/// distinct rows.
#[derive(Debug, Clone)]
pub struct CompressedPair {
    classes: Vec<RowClass>,
    signed: Vec<f64>,
}

/// Extremal entry with a witnessing index pair.
pub type Extremum = (f64, (usize, usize));

impl CompressedPair {
    /// Rows are grouped by exact bit pattern.
    pub fn new(a: &DenseMatrix, b: &DenseMatrix, signed_lambdas: &[f64]) -> Result<Self> {
        if a.shape() != b.shape() || a.cols() != signed_lambdas.len() {
            return Err(PackingError::Shape(format!("{:?} vs {:?} with {} eigenvalues", a.shape(), b.shape(), signed_lambdas.len())));
        }
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut classes: Vec<RowClass> = Vec::new();
        for i in 0..a.rows() {
            let key: Vec<u64> = a.row(i).iter().chain(b.row(i)).map(|v| v.to_bits()).collect();
            match index.get(&key) {
                Some(&k) => {
                    let c = &mut classes[k];
                    c.count += 1;
                    c.second.get_or_insert(i);
                }
                None => {
                    index.insert(key, classes.len());
                    classes.push(RowClass { a: a.row(i).to_vec(), b: b.row(i).to_vec(), count: 1, first: i, second: None });
                }
            }
        }
        Ok(Self { classes, signed: signed_lambdas.to_vec() })
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).zip(&self.signed).map(|((u, v), l)| u * v * l).sum()
    }

    /// `(P_A)_{st}`, `(P_B)_{st}` for class representatives.
    fn entries(&self, s: usize, t: usize) -> (f64, f64) {
        let (cs, ct) = (&self.classes[s], &self.classes[t]);
        (self.form(&cs.a, &ct.a), self.form(&cs.b, &ct.b))
    }

    /// Number of ordered off-diagonal / diagonal index pairs per class pair,
    /// and a witnessing index pair, for each `s ≤ t`.
    fn pairs(&self, include_diagonal: bool) -> Vec<(usize, usize, (usize, usize))> {
        let mut out = Vec::new();
        for s in 0..self.classes.len() {
            for t in s..self.classes.len() {
                let (cs, ct) = (&self.classes[s], &self.classes[t]);
                if s != t {
                    let (i, j) = (cs.first.min(ct.first), cs.first.max(ct.first));
                    out.push((s, t, (i, j)));
                } else {
                    if let Some(second) = cs.second {
                        out.push((s, t, (cs.first, second)));
                    }
                    if include_diagonal {
                        out.push((s, t, (cs.first, cs.first)));
                    }
                }
            }
        }
        out
    }

    fn extremes(&self, include_diagonal: bool, pick: impl Fn(&Self, usize, usize) -> f64) -> (Extremum, Extremum) {
        let mut lo = (f64::INFINITY, (0, 0));
        let mut hi = (f64::NEG_INFINITY, (0, 0));
        for (s, t, w) in self.pairs(include_diagonal) {
            let v = pick(self, s, t);
            if v < lo.0 {
                lo = (v, w);
            }
            if v > hi.0 {
                hi = (v, w);
            }
        }
        (lo, hi)
    }

    /// Smallest and largest entries of `P_A` with witnesses.
    pub fn range_a(&self, include_diagonal: bool) -> (Extremum, Extremum) {
        self.extremes(include_diagonal, |c, s, t| c.entries(s, t).0)
    }

    /// Smallest and largest entries of `P_B` with witnesses.
    pub fn range_b(&self, include_diagonal: bool) -> (Extremum, Extremum) {
        self.extremes(include_diagonal, |c, s, t| c.entries(s, t).1)
    }

    /// `‖P_A − P_B‖²_F` over the full matrix (diagonal included).
    pub fn frobenius_sq(&self) -> f64 {
        let k = self.classes.len();
        let mut acc = 0.0;
        for s in 0..k {
            for t in 0..k {
                let (pa, pb) = self.entries(s, t);
                acc += (self.classes[s].count * self.classes[t].count) as f64 * (pa - pb) * (pa - pb);
            }
        }
        acc
    }

    /// `Σ_{i<j} KL(Bern((P_A)_ij) ‖ Bern((P_B)_ij))`.
    pub fn kl(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (s, t, (i, j)) in self.pairs(false) {
            let (cs, ct) = (self.classes[s].count, self.classes[t].count);
            let weight = if s == t { cs * (cs - 1) / 2 } else { cs * ct } as f64;
            let (pa, pb) = self.entries(s, t);
            acc += weight * bernoulli_kl(pa, pb).ok_or(PackingError::InfiniteDivergence { i, j, p: pa, q: pb })?;
        }
        Ok(acc)
    }

    /// `‖P_A − P_B‖²_F / (a(1 − b))` with `a`, `b` the extreme entries of
    /// `P_B`.
    pub fn zhou(&self, include_diagonal: bool) -> f64 {
        let ((a, _), (b, _)) = self.range_b(include_diagonal);
        quadratic_bound(self.frobenius_sq(), a, b)
    }
}
