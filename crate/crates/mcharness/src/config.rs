//! Experiment configuration: vertex grid, signature, the sparsity /
//! condition-number schedules and trial counts, plus the shipped presets.

use std::fmt;

use netmodel::DiagonalMode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{McError, Result};

/// `s(n) = coef · n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub coef: f64,
    pub exponent: f64,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Self { coef: value, exponent: 0.0 }
    }

    pub fn power(coef: f64, exponent: f64) -> Self {
        Self { coef, exponent }
    }

    pub fn at(&self, n: usize) -> f64 {
        if self.exponent == 0.0 {
            self.coef
        } else {
            self.coef * (n as f64).powf(self.exponent)
        }
    }

    /// Same exponent, coefficient chosen so that `s(anchor_n) = value`.
    pub fn anchored(&self, anchor_n: usize, value: f64) -> Self {
        Self { coef: value / (anchor_n as f64).powf(self.exponent), exponent: self.exponent }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0.0 {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}n^{}", self.coef, self.exponent)
        }
    }
}

/// Which quantity is held fixed and which follows a family of schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FixedKappa { kappa: f64, rho_specs: Vec<Schedule> },
    FixedRho { rho: f64, kappa_specs: Vec<Schedule> },
}

/// One line of an experiment: a `(ρ_n, κ_n)` schedule pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub label: String,
    pub rho: Schedule,
    pub kappa: Schedule,
}

mod diagonal_serde {
    use netmodel::DiagonalMode;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &DiagonalMode, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(m.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DiagonalMode, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_diagonal() -> DiagonalMode {
    DiagonalMode::Hollow
}

/// Full description of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    pub p: usize,
    pub q: usize,
    pub regime: Regime,
    pub trials: usize,
    pub seed: u64,
    #[serde(with = "diagonal_serde", default = "default_diagonal")]
    pub diagonal_mode: DiagonalMode,
}

/// Grid `9000, 10000, …, 20000`.
pub fn full_grid() -> Vec<usize> {
    (9..=20).map(|k| k * 1000).collect()
}

/// Desk-scale grid.
pub fn desk_grid() -> Vec<usize> {
    vec![1000, 1500, 2000, 3000, 4000]
}

/// Sparsity schedules with constant `κ_n = 6`, all near 0.2 at `n = 9000`.
pub fn rho_schedules() -> Vec<Schedule> {
    vec![
        Schedule::constant(0.2),
        Schedule::power(20.0, -1.0 / 2.0),
        Schedule::power(90.0, -2.0 / 3.0),
        Schedule::power(190.0, -3.0 / 4.0),
        Schedule::power(300.0, -4.0 / 5.0),
        Schedule::power(400.0, -5.0 / 6.0),
        Schedule::power(1800.0, -1.0),
    ]
}

/// Condition-number schedules with constant `ρ_n = 0.9`, all near 6 at
/// `n = 9000`.
pub fn kappa_schedules() -> Vec<Schedule> {
    vec![
        Schedule::power(1207.0 / 500.0, 1.0 / 10.0),
        Schedule::power(971.0 / 1000.0, 1.0 / 5.0),
        Schedule::power(391.0 / 1000.0, 3.0 / 10.0),
        Schedule::power(157.0 / 1000.0, 2.0 / 5.0),
        Schedule::power(63.0 / 1000.0, 1.0 / 2.0),
        Schedule::power(1.0 / 40.0, 3.0 / 5.0),
        Schedule::power(1.0 / 100.0, 7.0 / 10.0),
        Schedule::power(1.0 / 250.0, 4.0 / 5.0),
    ]
}

/// Anchor values shared by every schedule of a family.
pub const RHO_ANCHOR: f64 = 0.2;
pub const KAPPA_ANCHOR: f64 = 6.0;
/// Fixed values of the non-varying quantity.
pub const FIXED_KAPPA: f64 = 6.0;
pub const FIXED_RHO: f64 = 0.9;
pub const DESK_TRIALS: usize = 40;

/// Which table a preset reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Constant κ, varying sparsity.
    Table1,
    /// Constant sparsity, varying κ.
    Table2,
}

impl std::str::FromStr for Preset {
    type Err = McError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            other => Err(McError::InvalidConfig(format!("unknown preset {other:?} (expected table1 or table2)"))),
        }
    }
}

impl ExperimentConfig {
    /// Full-scale preset: the reference grid, constants and trial counts
    /// (240 trials for constant κ, 200 for constant sparsity).
    pub fn full(preset: Preset, seed: u64) -> Self {
        let (regime, trials) = match preset {
            Preset::Table1 => (Regime::FixedKappa { kappa: FIXED_KAPPA, rho_specs: rho_schedules() }, 240),
            Preset::Table2 => (Regime::FixedRho { rho: FIXED_RHO, kappa_specs: kappa_schedules() }, 200),
        };
        Self { n_grid: full_grid(), p: 2, q: 1, regime, trials, seed, diagonal_mode: DiagonalMode::Hollow }
    }

    /// Desk-scale preset: small grid, 40 trials, schedule constants
    /// rescaled so every schedule passes through the family's anchor value
    /// at the smallest grid size.
    pub fn desk(preset: Preset, seed: u64) -> Self {
        let grid = desk_grid();
        let anchor = grid[0];
        let regime = match preset {
            Preset::Table1 => Regime::FixedKappa {
                kappa: FIXED_KAPPA,
                rho_specs: rho_schedules().iter().map(|s| s.anchored(anchor, RHO_ANCHOR)).collect(),
            },
            Preset::Table2 => Regime::FixedRho {
                rho: FIXED_RHO,
                kappa_specs: kappa_schedules().iter().map(|s| s.anchored(anchor, KAPPA_ANCHOR)).collect(),
            },
        };
        Self { n_grid: grid, p: 2, q: 1, regime, trials: DESK_TRIALS, seed, diagonal_mode: DiagonalMode::Hollow }
    }

    /// Desk-scale run of the constant-sparsity anchor line only
    /// (`κ = 6`, `ρ = 0.2`).
    pub fn desk_anchor(seed: u64) -> Self {
        let mut cfg = Self::desk(Preset::Table1, seed);
        cfg.regime = Regime::FixedKappa { kappa: FIXED_KAPPA, rho_specs: vec![Schedule::constant(RHO_ANCHOR)] };
        cfg
    }

    pub fn d(&self) -> usize {
        self.p + self.q
    }

    pub fn settings(&self) -> Vec<Setting> {
        match &self.regime {
            Regime::FixedKappa { kappa, rho_specs } => rho_specs
                .iter()
                .map(|r| Setting { label: format!("rho={r}"), rho: *r, kappa: Schedule::constant(*kappa) })
                .collect(),
            Regime::FixedRho { rho, kappa_specs } => kappa_specs
                .iter()
                .map(|k| Setting { label: format!("kappa={k}"), rho: Schedule::constant(*rho), kappa: *k })
                .collect(),
        }
    }

    /// Structural checks; model validity at each `(n, ρ, κ)` is checked when
    /// the model is built.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(McError::InvalidConfig(m));
        if self.n_grid.is_empty() {
            return bad("n_grid is empty".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n_grid {:?} must be strictly increasing", self.n_grid));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        let settings = self.settings();
        if settings.is_empty() {
            return bad("no schedules given".into());
        }
        for s in &settings {
            for &n in &self.n_grid {
                let (rho, kappa) = (s.rho.at(n), s.kappa.at(n));
                if !(rho > 0.0 && rho <= 1.0) {
                    return bad(format!("{}: rho = {rho} at n = {n} is outside (0, 1]", s.label));
                }
                if !(kappa >= 1.0 && kappa.is_finite()) {
                    return bad(format!("{}: kappa = {kappa} at n = {n} must be at least 1", s.label));
                }
            }
        }
        Ok(())
    }

    /// Canonical JSON of the configuration.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serialises")
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
