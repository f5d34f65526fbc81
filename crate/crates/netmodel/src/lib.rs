//! Low-rank network models.
//!
//! A generalized random dot product graph with signature `(p, q)` has edge
//! probabilities `P = U Λ^{1/2} I_{p,q} Λ^{1/2} Uᵀ`, optionally scaled by a
//! sparsity factor `ρ`. This crate builds and validates such matrices, samples
//! adjacency matrices from them with a counter-based RNG, draws latent
//! positions from the standard examples, and evaluates condition-number
//! windows.

mod adjacency;
mod condition;
mod error;
mod latent;
mod model;
mod rng;

pub use adjacency::{sample_adjacency, sample_adjacency_trial, write_edge_list, AdjacencyMatrix, DiagonalMode};
pub use condition::{
    ball_orthant_delta, ball_orthant_kappa_closed_form, condition_window, empirical_condition_number,
    grdpg_interval_delta, indefinite_condition_number, uniform_cube_delta, ConditionWindow,
};
pub use error::ModelError;
pub use latent::{sample_latent_grdpg_intervals, sample_latent_uniform_cube};
pub use model::{probability_matrix, ProbabilityMatrix, Signature, SpectralPair};
pub use rng::{derive_seed, row_stream};

pub type Result<T> = std::result::Result<T, ModelError>;

/// Entries within this distance of `[0, 1]` are clamped silently.
pub const CLAMP_TOLERANCE: f64 = 1e-12;
/// Entries further than this outside `[0, 1]` make the model invalid.
pub const INVALID_TOLERANCE: f64 = 1e-9;
