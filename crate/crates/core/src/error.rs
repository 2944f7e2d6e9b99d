use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined
    /// (zero separation, non-positive gap, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A tuning parameter (step size, truncation, tolerance) is out of range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Evaluation on the real-frequency axis hit a resonance pole.
    #[error("pole of the polarizability at frequency {location}")]
    Pole { location: f64 },

    /// The requested quantity is a distribution (sharp spectral line) and has
    /// no pointwise value.
    #[error("distributional quantity: {0}")]
    Distributional(String),

    /// A quadrature or series did not reach the requested accuracy.
    #[error("no convergence: achieved error {achieved:e}, requested {requested:e}")]
    Convergence { achieved: f64, requested: f64 },

    /// Two independent evaluation routes disagreed beyond tolerance.
    #[error("internal consistency check `{check}` failed: discrepancy {discrepancy:e}")]
    InternalConsistency {
        check: &'static str,
        discrepancy: f64,
    },

    /// The final result is not representable as a finite f64.
    #[error("overflow evaluating {0}")]
    Overflow(&'static str),

    /// The sampling grid is too coarse for the fastest mode of the kernel.
    #[error("grid too coarse: fastest mode {frequency} times step {step} exceeds {limit}")]
    Resolution { frequency: f64, step: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Checks a strictly positive finite argument.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
