//! Two-to-infinity pseudo-distance over the indefinite orthogonal group
//! `O(1,1)` for 2×2 latent-position matrices.
//!
//! Every element of `O(1,1)` is `Q(α)Γ` with the hyperbolic rotation
//! `Q(α) = [[cosh α, sinh α], [sinh α, cosh α]]` and `Γ ∈ {±I, ±I_{1,1}}`.
//! The pseudo-distance
//! `f(X, Y) = min_Γ inf_{α₁,α₂} ‖X Q(α₁) − Y Γ Q(α₂)‖_{2,∞}` is evaluated by
//! an exhaustive grid over a box followed by Nelder–Mead refinement from
//! the best grid cell. The fixed triple [`CounterexampleTriple`] shows that
//! `f` violates the triangle inequality.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod descent;

pub use descent::{nelder_mead, DescentOptions, DescentResult};

/// Row-major 2×2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// Largest `|α|` for which `cosh α` is finite.
pub const ALPHA_LIMIT: f64 = 710.0;
/// Default half-width of the search box.
pub const DEFAULT_BOX: f64 = 7.0;
/// Default points per axis of the search grid.
pub const DEFAULT_RESOLUTION: usize = 1000;
/// Relative tolerance of the coercivity inequality.
pub const COERCIVITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HyperbolicError {
    #[error("|alpha| = {0} exceeds the overflow guard {ALPHA_LIMIT}")]
    Overflow(f64),
    #[error("objective is not coercive for {pair} (gamma = {gamma:?}); the minimum may escape the box")]
    NotCoercive { pair: String, gamma: Gamma },
    #[error("grid resolution must be at least 2, got {0}")]
    Resolution(usize),
    #[error("box half-width must be positive and finite, got {0}")]
    BoxSize(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HyperbolicError>;

/// The discrete factor `Γ` of an element `Q(α)Γ` of `O(1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    Identity,
    Ipq,
    NegIdentity,
    NegIpq,
}

impl Gamma {
    pub const REDUCED: [Gamma; 2] = [Gamma::Identity, Gamma::Ipq];
    pub const ALL: [Gamma; 4] = [Gamma::Identity, Gamma::Ipq, Gamma::NegIdentity, Gamma::NegIpq];

    /// Column signs of `Γ` (it is diagonal).
    pub fn signs(self) -> [f64; 2] {
        match self {
            Gamma::Identity => [1.0, 1.0],
            Gamma::Ipq => [1.0, -1.0],
            Gamma::NegIdentity => [-1.0, -1.0],
            Gamma::NegIpq => [-1.0, 1.0],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gamma::Identity => "identity",
            Gamma::Ipq => "ipq",
            Gamma::NegIdentity => "neg_identity",
            Gamma::NegIpq => "neg_ipq",
        }
    }
}

impl std::str::FromStr for Gamma {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Gamma::ALL.into_iter().find(|g| g.as_str() == s).ok_or_else(|| format!("unknown gamma {s:?}"))
    }
}

/// A point `(α₁, α₂, Γ)` of the search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma: Gamma,
}

/// `Y Γ`.
pub fn apply_gamma(y: &Mat2, gamma: Gamma) -> Mat2 {
    let s = gamma.signs();
    [[y[0][0] * s[0], y[0][1] * s[1]], [y[1][0] * s[0], y[1][1] * s[1]]]
}

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `Q(α) = [[cosh α, sinh α], [sinh α, cosh α]]`.
pub fn hyperbolic_rotation(alpha: f64) -> Result<Mat2> {
    if !(alpha.abs() <= ALPHA_LIMIT) {
        return Err(HyperbolicError::Overflow(alpha.abs()));
    }
    let (c, s) = (alpha.cosh(), alpha.sinh());
    Ok([[c, s], [s, c]])
}

/// `‖X Q(α₁) − Y Q(α₂)‖_{2,∞}`: the largest Euclidean row norm.
pub fn g_objective(x: &Mat2, y: &Mat2, alpha1: f64, alpha2: f64) -> f64 {
    let (c1, s1) = (alpha1.cosh(), alpha1.sinh());
    let (c2, s2) = (alpha2.cosh(), alpha2.sinh());
    row_max(x, y, (c1, s1), (c2, s2))
}

#[inline]
fn row_max(x: &Mat2, y: &Mat2, (c1, s1): (f64, f64), (c2, s2): (f64, f64)) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        let a = x[i][0] * c1 + x[i][1] * s1 - (y[i][0] * c2 + y[i][1] * s2);
        let b = x[i][0] * s1 + x[i][1] * c1 - (y[i][0] * s2 + y[i][1] * c2);
        worst = worst.max(a.hypot(b));
    }
    worst
}

/// `X W*` with `W* = (1/√2)[[1, 1], [1, −1]]`, which diagonalises every
/// `Q(α)` as `W* diag(e^α, e^{−α}) W*`.
pub fn rotate_to_light_cone(x: &Mat2) -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[h * (x[0][0] + x[0][1]), h * (x[0][0] - x[0][1])], [h * (x[1][0] + x[1][1]), h * (x[1][0] - x[1][1])]]
}

/// Coercivity of `(α₁, α₂) ↦ g(X, Y, α₁, α₂)`: with `X̃ = XW*`,
/// `Ỹ = YW*`, requires `x̃_{1i} ỹ_{2i} ≠ x̃_{2i} ỹ_{1i}` for both columns,
/// the inequality holding relative to `|x̃_{1i} ỹ_{2i}| + |x̃_{2i} ỹ_{1i}|`.
pub fn coercivity_check(x: &Mat2, y: &Mat2) -> bool {
    let (xt, yt) = (rotate_to_light_cone(x), rotate_to_light_cone(y));
    (0..2).all(|i| {
        let (a, b) = (xt[0][i] * yt[1][i], xt[1][i] * yt[0][i]);
        (a - b).abs() > COERCIVITY_TOLERANCE * (a.abs() + b.abs())
    })
}

/// Hypothesis under which `Γ ∈ {−I, −I_{1,1}}` can never be optimal: both
/// first columns strictly positive and `m_{i1}² − m_{i2}² > 0` on every row.
pub fn reduction_applies(x: &Mat2, y: &Mat2) -> bool {
    [x, y].iter().all(|m| (0..2).all(|i| m[i][0] > 0.0 && m[i][0] * m[i][0] - m[i][1] * m[i][1] > 0.0))
}

/// `resolution` equally spaced points on `[−half_width, half_width]`,
/// endpoints included.
pub fn axis(half_width: f64, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 2 {
        return Err(HyperbolicError::Resolution(resolution));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(HyperbolicError::BoxSize(half_width));
    }
    let step = 2.0 * half_width / (resolution - 1) as f64;
    Ok((0..resolution).map(|k| if k == resolution - 1 { half_width } else { -half_width + k as f64 * step }).collect())
}

/// Smallest grid value of `g(X, Y, ·, ·)` and its grid point. Rows of the
/// grid are evaluated in parallel; ties resolve to the first point in
/// row-major order.
pub fn grid_minimum(x: &Mat2, y: &Mat2, half_width: f64, resolution: usize) -> Result<(f64, f64, f64)> {
    let ax = axis(half_width, resolution)?;
    let trig: Vec<(f64, f64)> = ax.iter().map(|a| (a.cosh(), a.sinh())).collect();
    let best = trig
        .par_iter()
        .enumerate()
        .map(|(i, &t1)| {
            let mut best = (f64::INFINITY, 0usize);
            for (j, &t2) in trig.iter().enumerate() {
                let v = row_max(x, y, t1, t2);
                if v < best.0 {
                    best = (v, j);
                }
            }
            (best.0, i, best.1)
        })
        .reduce(|| (f64::INFINITY, usize::MAX, usize::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a });
    Ok((best.0, ax[best.1], ax[best.2]))
}

/// Minimisation result for one `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaMinimum {
    pub gamma: Gamma,
    pub grid_value: f64,
    pub grid_argmin: (f64, f64),
    pub value: f64,
    pub argmin: (f64, f64),
    pub iterations: usize,
}

/// `f(X, Y)` with its minimiser and the per-`Γ` breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoDistance {
    pub value: f64,
    pub params: HyperbolicParams,
    /// Whether the search was reduced to `Γ ∈ {I, I_{1,1}}`.
    pub reduced: bool,
    pub per_gamma: Vec<GammaMinimum>,
}

/// `f(X, Y) = min_Γ inf_{α₁,α₂} g(X, YΓ, α₁, α₂)`. For each `Γ` the grid
/// minimum over `[−b, b]²` is refined by Nelder–Mead from the best cell.
/// `Γ` ranges over `{I, I_{1,1}}` when [`reduction_applies`], otherwise over
/// all four signs. Every searched objective must be coercive, except the
/// degenerate case `X = YΓ`, where the minimum 0 is attained on the diagonal
/// `α₁ = α₂` of any box.
pub fn f_pseudo_distance(x: &Mat2, y: &Mat2, resolution: usize, half_width: f64) -> Result<PseudoDistance> {
    let reduced = reduction_applies(x, y);
    let gammas: &[Gamma] = if reduced { &Gamma::REDUCED } else { &Gamma::ALL };
    let mut per_gamma = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let yg = apply_gamma(y, gamma);
        if x != &yg && !coercivity_check(x, &yg) {
            return Err(HyperbolicError::NotCoercive { pair: format!("{x:?} vs {y:?}"), gamma });
        }
        let (grid_value, a1, a2) = grid_minimum(x, &yg, half_width, resolution)?;
        let step = 2.0 * half_width / (resolution - 1) as f64;
        let refined = nelder_mead(|p| g_objective(x, &yg, p[0], p[1]), [a1, a2], step, &DescentOptions::default());
        let (value, argmin) =
            if refined.value < grid_value { (refined.value, (refined.point[0], refined.point[1])) } else { (grid_value, (a1, a2)) };
        per_gamma.push(GammaMinimum { gamma, grid_value, grid_argmin: (a1, a2), value, argmin, iterations: refined.iterations });
    }
    let best = per_gamma.iter().fold(per_gamma[0], |b, m| if m.value < b.value { *m } else { b });
    Ok(PseudoDistance {
        value: best.value,
        params: HyperbolicParams { alpha1: best.argmin.0, alpha2: best.argmin.1, gamma: best.gamma },
        reduced,
        per_gamma,
    })
}

/// The three matrices of the triangle-inequality counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleTriple {
    pub x: Mat2,
    pub y: Mat2,
    pub z: Mat2,
}

impl Default for CounterexampleTriple {
    fn default() -> Self {
        Self { x: [[1.9, 1.2], [4.0, -3.8]], y: [[12.7, -9.8], [4.1, -0.9]], z: [[0.03, -0.02], [2.3, -1.9]] }
    }
}

/// Result of evaluating `f` on all three pairs of a triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    #[serde(rename = "fXY")]
    pub f_xy: f64,
    #[serde(rename = "fXZ")]
    pub f_xz: f64,
    #[serde(rename = "fYZ")]
    pub f_yz: f64,
    /// `f(X,Y) + f(X,Z) < f(Y,Z)`.
    pub triangle_violated: bool,
    pub argmins: Vec<(String, PseudoDistance)>,
}

/// Evaluate `f(X,Y)`, `f(X,Z)`, `f(Y,Z)` and the triangle inequality.
pub fn run_counterexample(t: &CounterexampleTriple, resolution: usize, half_width: f64) -> Result<CounterexampleReport> {
    let xy = f_pseudo_distance(&t.x, &t.y, resolution, half_width)?;
    let xz = f_pseudo_distance(&t.x, &t.z, resolution, half_width)?;
    let yz = f_pseudo_distance(&t.y, &t.z, resolution, half_width)?;
    Ok(CounterexampleReport {
        f_xy: xy.value,
        f_xz: xz.value,
        f_yz: yz.value,
        triangle_violated: xy.value + xz.value < yz.value,
        argmins: vec![("XY".into(), xy), ("XZ".into(), xz), ("YZ".into(), yz)],
    })
}

/// Write `(α₁, α₂, g(X, YΓ, α₁, α₂))` on the grid as CSV (17 significant
/// digits); returns the grid minimum and its grid point.
pub fn contour_grid<W: Write>(x: &Mat2, y: &Mat2, gamma: Gamma, half_width: f64, resolution: usize, out: W) -> Result<(f64, f64, f64)> {
    let ax = axis(half_width, resolution)?;
    let yg = apply_gamma(y, gamma);
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "alpha1,alpha2,g")?;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &a1 in &ax {
        let values: Vec<f64> = ax.par_iter().map(|&a2| g_objective(x, &yg, a1, a2)).collect();
        for (&a2, &v) in ax.iter().zip(&values) {
            writeln!(out, "{a1:.16e},{a2:.16e},{v:.16e}")?;
            if v < best.0 {
                best = (v, a1, a2);
            }
        }
    }
    out.flush()?;
    Ok(best)
}
