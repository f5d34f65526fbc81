//! Outer Monte Carlo loop over settings, grid sizes and trials.

use netmodel::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::model::build_experiment_model;
use crate::trial::{run_trial, TrialRecord};
use crate::Result;

/// Aggregated errors of one `(setting, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: usize,
    pub rho: f64,
    pub kappa: f64,
    pub mean_latent: f64,
    pub mean_subspace: f64,
    /// Standard error of the mean (sample standard deviation over `√M`).
    pub stderr_latent: f64,
    pub stderr_subspace: f64,
    pub setting: String,
    /// Successful trials.
    pub trials: usize,
    pub failures: usize,
}

/// A trial that raised an error; the run continues without it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub setting: String,
    pub n: usize,
    pub trial_index: u64,
    pub message: String,
}

/// Per-trial records tagged with their setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedRecord {
    pub setting: String,
    #[serde(flatten)]
    pub record: TrialRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub config_hash: String,
    pub rows: Vec<ResultRow>,
    pub records: Vec<TaggedRecord>,
    pub failures: Vec<TrialFailure>,
}

/// Seed of cell `(setting, grid index)`; trials within the cell are keyed
/// by their index on top of it.
pub fn cell_seed(seed: u64, setting: usize, grid_index: usize) -> u64 {
    derive_seed(seed, ((setting as u64) << 32) | grid_index as u64)
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// Run every trial of every `(setting, n)` cell. Cells run in order, trials
/// within a cell in parallel; results are collected by trial index so the
/// output does not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (s, setting) in config.settings().iter().enumerate() {
        for (g, &n) in config.n_grid.iter().enumerate() {
            let (rho, kappa) = (setting.rho.at(n), setting.kappa.at(n));
            let (p0, truth) = build_experiment_model(n, rho, kappa, config.p, config.q)?;
            let seed = cell_seed(config.seed, s, g);
            let outcomes: Vec<_> = (0..config.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(&p0, &truth, rho, kappa, seed, t, config.diagonal_mode))
                .collect();
            let mut latent = Vec::with_capacity(outcomes.len());
            let mut subspace = Vec::with_capacity(outcomes.len());
            let mut failed = 0;
            for (t, outcome) in outcomes.into_iter().enumerate() {
                match outcome {
                    Ok(rec) => {
                        latent.push(rec.latent_error);
                        subspace.push(rec.subspace_error);
                        records.push(TaggedRecord { setting: setting.label.clone(), record: rec });
                    }
                    Err(e) => {
                        failed += 1;
                        failures.push(TrialFailure { setting: setting.label.clone(), n, trial_index: t as u64, message: e.to_string() });
                    }
                }
            }
            let (mean_latent, stderr_latent) = mean_and_stderr(&latent);
            let (mean_subspace, stderr_subspace) = mean_and_stderr(&subspace);
            rows.push(ResultRow {
                n,
                rho,
                kappa,
                mean_latent,
                mean_subspace,
                stderr_latent,
                stderr_subspace,
                setting: setting.label.clone(),
                trials: latent.len(),
                failures: failed,
            });
        }
    }
    Ok(ExperimentOutput { config_hash: config.config_hash(), rows, records, failures })
}
