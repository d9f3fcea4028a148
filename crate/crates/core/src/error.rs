use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the toolkit.
///
/// Variants carry enough context for a caller (or the CLI) to print a
/// one-line diagnostic without re-deriving anything.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("n! overflows double precision at order {order}; use the Borel-plane representation")]
    Overflow { order: usize },

    #[error("offset mismatch: expected {expected}, found {found}")]
    OffsetMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (maximum {max})")]
    OutOfRange { index: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge (best estimate {best}, error estimate {err:e})")]
    Accuracy { best: Complex64, err: f64 },

    #[error("singularity of the Borel transform on or next to the ray theta={theta} (at {point})")]
    PoleOnRay { theta: f64, point: Complex64 },

    #[error("path passes within {clearance:e} of the singular point {point}")]
    Path { point: Complex64, clearance: f64 },

    #[error("step size underflow at x={at} (stiff or singular region)")]
    Stiffness { at: Complex64 },

    #[error("degenerate Pade order [{numerator}/{denominator}]: linear system is singular or ill-conditioned (cond ~ {condition:e}); try a smaller denominator degree")]
    DegenerateOrder {
        numerator: usize,
        denominator: usize,
        condition: f64,
    },

    #[error("direction theta={theta} lies within {clearance} rad of the exceptional direction {exceptional}")]
    StokesDirection {
        theta: f64,
        exceptional: f64,
        clearance: f64,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("resonance: 1/(2 sqrt(eps)) = {order} is a positive integer (eps = {eps}); the local solution at -sqrt(eps) carries a logarithmic term")]
    Resonance { order: usize, eps: f64 },

    #[error("series is not Borel-summable along the positive real axis: {0}")]
    NotSummable(String),

    #[error("output error: {0}")]
    Io(String),

    #[error("connection fit failed: relative misfit {residual:e} exceeds {limit:e}")]
    Fit { residual: f64, limit: f64 },
}

impl Error {
    /// Errors that stem from bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSeries(_)
                | Error::Precondition(_)
                | Error::OffsetMismatch { .. }
                | Error::OutOfRange { .. }
                | Error::Configuration(_)
        )
    }
}
