//! Exhaustive angle-grid oracle over `O(p) × O(q)` for `p ≤ 2`, `q ≤ 1`.
//!
//! The two-dimensional block is parametrised as `R(θ)·diag(1, ±1)`; the
//! one-dimensional blocks are `±1`. Every residual row moves by at most
//! `‖a_{i,p}‖·|θ − θ'|` when the angle changes, so the grid minimum minus
//! `L·h` (with `h` the half-spacing and `L` the objective's Lipschitz
//! constant in `θ`) is a certified lower bound on the exact minimum. The
//! best cell is then refined by golden-section search.

use std::collections::HashMap;
use std::f64::consts::PI;

use matrixkit::DenseMatrix;
use netmodel::Signature;
use rayon::prelude::*;

use crate::{AlignmentError, BlockRotation, Result};

/// Residual norm being minimised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Frobenius,
    TwoToInfinity,
}

/// Distinct `(x̂_i, x_i)` row pairs with multiplicities.
#[derive(Debug, Clone)]
pub struct WeightedRows {
    pub d: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub weights: Vec<f64>,
}

impl WeightedRows {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Collapse bit-identical row pairs. Objective values are unchanged: the
/// two-to-infinity norm only sees distinct rows and the Frobenius norm
/// weights each by its multiplicity.
pub fn dedup_row_pairs(xhat: &DenseMatrix, x: &DenseMatrix) -> WeightedRows {
    let d = xhat.cols();
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut rows = WeightedRows { d, a: Vec::new(), b: Vec::new(), weights: Vec::new() };
    for i in 0..xhat.rows() {
        let key: Vec<u64> = xhat.row(i).iter().chain(x.row(i)).map(|v| v.to_bits()).collect();
        match index.get(&key) {
            Some(&k) => rows.weights[k] += 1.0,
            None => {
                index.insert(key, rows.weights.len());
                rows.a.extend_from_slice(xhat.row(i));
                rows.b.extend_from_slice(x.row(i));
                rows.weights.push(1.0);
            }
        }
    }
    rows
}

/// Bracket for the exact minimum of the chosen residual norm.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Smallest objective value found (grid plus refinement); an upper
    /// bound on the exact minimum, attained by `rotation`.
    pub value: f64,
    /// Certified lower bound on the exact minimum.
    pub lower_bound: f64,
    pub rotation: BlockRotation,
    /// Number of group elements evaluated.
    pub evaluations: usize,
    /// Distinct row pairs after deduplication.
    pub unique_rows: usize,
}

/// Group element in parametric form.
#[derive(Debug, Clone, Copy)]
struct Element {
    theta: f64,
    /// `+1` rotation, `−1` rotation followed by a reflection (two-dimensional
    /// block), or the sign of a one-dimensional `p` block.
    p_sign: f64,
    q_sign: f64,
}

struct Evaluator<'a> {
    rows: &'a WeightedRows,
    p: usize,
    q: usize,
    objective: Objective,
}

impl Evaluator<'_> {
    fn value(&self, e: Element) -> f64 {
        let d = self.rows.d;
        let (c, s) = (e.theta.cos(), e.theta.sin());
        let mut acc = 0.0_f64;
        let mut r = [0.0_f64; 3];
        for k in 0..self.rows.len() {
            let a = &self.rows.a[k * d..(k + 1) * d];
            let b = &self.rows.b[k * d..(k + 1) * d];
            match self.p {
                2 => {
                    r[0] = a[0] * c + a[1] * s;
                    r[1] = e.p_sign * (-a[0] * s + a[1] * c);
                }
                1 => r[0] = e.p_sign * a[0],
                _ => {}
            }
            if self.q == 1 {
                r[self.p] = e.q_sign * a[self.p];
            }
            let mut sq = 0.0;
            for j in 0..d {
                let diff = r[j] - b[j];
                sq += diff * diff;
            }
            match self.objective {
                Objective::Frobenius => acc += self.rows.weights[k] * sq,
                Objective::TwoToInfinity => acc = acc.max(sq),
            }
        }
        acc.sqrt()
    }

    /// Lipschitz constant of the objective in `θ`.
    fn lipschitz(&self) -> f64 {
        if self.p != 2 {
            return 0.0;
        }
        let d = self.rows.d;
        let norms = (0..self.rows.len()).map(|k| {
            let a = &self.rows.a[k * d..k * d + 2];
            (a[0] * a[0] + a[1] * a[1], self.rows.weights[k])
        });
        match self.objective {
            Objective::Frobenius => norms.map(|(n2, w)| w * n2).sum::<f64>().sqrt(),
            Objective::TwoToInfinity => norms.map(|(n2, _)| n2).fold(0.0, f64::max).sqrt(),
        }
    }

    fn rotation(&self, e: Element) -> BlockRotation {
        let w_p = match self.p {
            2 => {
                let (c, s) = (e.theta.cos(), e.theta.sin());
                DenseMatrix::new(2, 2, vec![c, -s * e.p_sign, s, c * e.p_sign]).expect("2x2 block")
            }
            1 => DenseMatrix::new(1, 1, vec![e.p_sign]).expect("1x1 block"),
            _ => DenseMatrix::zeros(0, 0),
        };
        let w_q = if self.q == 1 { DenseMatrix::new(1, 1, vec![e.q_sign]).expect("1x1 block") } else { DenseMatrix::zeros(0, 0) };
        BlockRotation::new(w_p, w_q).expect("parametrised blocks are orthogonal")
    }
}

fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Minimise `‖X̂ W − X‖` over `W ∈ O(p) × O(q)` on an angle grid of spacing
/// at most `step` radians, followed by local refinement.
///
/// The reduction over grid cells runs in parallel but is deterministic
/// (minimum value, ties broken by lowest index).
pub fn grid_minimum(
    xhat: &DenseMatrix,
    x: &DenseMatrix,
    sig: Signature,
    objective: Objective,
    step: f64,
) -> Result<OracleResult> {
    let (p, q) = (sig.p, sig.q);
    if p > 2 || q > 1 {
        return Err(AlignmentError::UnsupportedSignature { p, q });
    }
    if xhat.shape() != x.shape() || xhat.cols() != sig.d() {
        return Err(AlignmentError::Shape(format!("{:?} vs {:?} for d = {}", xhat.shape(), x.shape(), sig.d())));
    }
    if !(step > 0.0 && step < PI) {
        return Err(AlignmentError::InvalidArgument(format!("grid step {step} must lie in (0, π)")));
    }
    let rows = dedup_row_pairs(xhat, x);
    let eval = Evaluator { rows: &rows, p, q, objective };
    let p_signs: &[f64] = if p >= 1 { &[1.0, -1.0] } else { &[1.0] };
    let q_signs: &[f64] = if q == 1 { &[1.0, -1.0] } else { &[1.0] };
    let n_theta = if p == 2 { (2.0 * PI / step).ceil() as usize } else { 1 };
    let spacing = 2.0 * PI / n_theta as f64;

    let combos: Vec<(f64, f64)> = p_signs.iter().flat_map(|&ps| q_signs.iter().map(move |&qs| (ps, qs))).collect();
    let total = combos.len() * n_theta;
    let element = |idx: usize| {
        let (ps, qs) = combos[idx / n_theta];
        Element { theta: (idx % n_theta) as f64 * spacing, p_sign: ps, q_sign: qs }
    };
    let best = (0..total)
        .into_par_iter()
        .map(|idx| (eval.value(element(idx)), idx))
        .reduce(|| (f64::INFINITY, usize::MAX), better);
    let mut best_el = element(best.1);
    let mut best_val = best.0;
    let lower_bound = (best_val - eval.lipschitz() * spacing / 2.0).max(0.0);
    let mut evaluations = total;

    if p == 2 {
        // Golden-section search on the bracketing cells.
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let at = |t: f64| eval.value(Element { theta: t, ..best_el });
        let (mut lo, mut hi) = (best_el.theta - spacing, best_el.theta + spacing);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (at(x1), at(x2));
        for _ in 0..80 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = at(x2);
            }
            evaluations += 1;
        }
        let (t, f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if f < best_val {
            best_val = f;
            best_el.theta = t;
        }
    }

    Ok(OracleResult {
        value: best_val,
        lower_bound: lower_bound.min(best_val),
        rotation: eval.rotation(best_el),
        evaluations,
        unique_rows: rows.len(),
    })
}
