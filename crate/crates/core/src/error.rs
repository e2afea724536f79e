//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThinError {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The intensity pair admits no deterministic thinning; carries the
    /// blocking integer of the non-existence condition.
    #[error("no thinning exists from lambda to mu (blocking k = {blocking_k})")]
    Infeasible { blocking_k: u32 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// An internal consistency check failed; indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ThinError>;
