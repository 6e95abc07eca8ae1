//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not symmetric positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("not reducible to target-curvature form: {0}")]
    NotReducible(String),

    #[error("non-positive Jacobian at x = ({x1}, {x2}, {x3})")]
    NonPositiveJacobian { x1: f64, x2: f64, x3: f64 },

    #[error("{0} did not converge")]
    NoConvergence(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
