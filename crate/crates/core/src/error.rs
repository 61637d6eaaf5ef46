use thiserror::Error;

/// Errors raised by exact operator arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    /// A coefficient product would exceed the parameter-degree cap.
    /// The cap exists to catch runaway symbolic growth early; raise it with
    /// [`crate::param::set_param_degree_cap`] or `SUPERALG_MAX_PARAM_DEGREE`.
    #[error("parameter monomial degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    /// Momentum degree of the zero expression is undefined.
    #[error("momentum degree of the zero expression is undefined")]
    ZeroExpression,

    /// An exponent too large for repeated-multiplication lowering.
    #[error("exponent {0} out of supported range")]
    ExponentOutOfRange(i64),
}

/// Errors raised while building numeric model parameters or spectra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("parameter constraint violated: {0}")]
    InvalidParams(String),

    #[error("numeric arguments must be finite: {0}")]
    NonFinite(String),

    #[error("{0}")]
    Unsupported(String),
}
