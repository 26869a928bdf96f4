use thiserror::Error;

/// Errors raised by the laboratory. Validation errors carry the offending
/// field name so front ends can point at the bad input.
#[derive(Debug, Error)]
pub enum InlsError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("ground-state iteration did not converge after {iterations} iterations (residual {residual:.3e}, step {step:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        step: f64,
    },

    #[error("ground-state iteration diverged: stabilizing factor {factor:.3e} at iteration {iteration}")]
    Divergence { iteration: usize, factor: f64 },

    #[error("non-finite value produced at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("requires {required} parameters, got {actual}")]
    Regime {
        required: &'static str,
        actual: String,
    },

    #[error("no blow-up regime detected: {0}")]
    NoBlowup(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl InlsError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        InlsError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for input-validation failures (as opposed to numerical ones).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            InlsError::Invalid { .. }
                | InlsError::Regime { .. }
                | InlsError::Hypothesis(_)
                | InlsError::Format(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, InlsError>;
