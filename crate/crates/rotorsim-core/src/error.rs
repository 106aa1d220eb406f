//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by construction and simulation routines.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("register too large: dimension {dim} exceeds cap {cap}")]
    RegisterTooLarge { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("site index {site} out of range for a {n_sites}-site register")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("duplicate target site {site}")]
    DuplicateSite { site: usize },

    #[error("operator is not unitary (‖U†U − I‖_max = {dev:.3e})")]
    NotUnitary { dev: f64 },

    #[error("Kraus channel violates completeness (‖ΣK†K − I‖_max = {dev:.3e})")]
    IncompleteChannel { dev: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigenphase branch ambiguity: |E·dt| = {value:.4} is within {margin:.1e} of π")]
    BranchAmbiguity { value: f64, margin: f64 },

    #[error("trace drifted by {dev:.3e} during evolution (limit {limit:.1e})")]
    TraceDrift { dev: f64, limit: f64 },

    #[error("no spectral peak found above the noise floor")]
    NoPeak,

    #[error("fit refused: {0}")]
    FitRefused(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
