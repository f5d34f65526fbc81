//! Monte Carlo harness for spectral embedding error rates.
//!
//! For each `(ρ_n, κ_n)` schedule and grid size `n` the harness builds the
//! simulation model, samples `M` adjacency matrices, embeds them, aligns
//! the estimates by block Procrustes and records the two-to-infinity
//! errors of the latent positions and of the subspace. Mean errors are
//! regressed on `log n` and compared with the slopes of the minimax lower
//! bounds.

use thiserror::Error;

pub mod config;
pub mod experiment;
pub mod io;
pub mod model;
pub mod regression;
pub mod trial;

/// JSON schema of result documents.
pub const RESULTS_SCHEMA: &str = include_str!("../schemas/results.schema.json");
/// JSON schema of experiment configurations.
pub const CONFIG_SCHEMA: &str = include_str!("../schemas/config.schema.json");

pub use config::{desk_grid, full_grid, kappa_schedules, rho_schedules, ExperimentConfig, Preset, Regime, Schedule, Setting};
pub use experiment::{cell_seed, run_experiment, ExperimentOutput, ResultRow, TaggedRecord, TrialFailure};
pub use io::{emit_results, emit_trials, format_real, read_results_csv, read_results_json, Format, Provenance, ResultsFile};
pub use model::{build_experiment_model, experiment_magnitudes, lambda_star};
pub use regression::{loglog_slope, lower_bound, rates_from_rows, theoretical_lower_slope, ErrorKind, RateRegression, SettingRates};
pub use trial::{estimation_errors, run_trial, TrialRecord};

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("regression: {0}")]
    Regression(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] netmodel::ModelError),
    #[error(transparent)]
    Packing(#[from] packing::PackingError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Alignment(#[from] alignment::AlignmentError),
    #[error(transparent)]
    Matrix(#[from] matrixkit::MatrixError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, McError>;
