use thiserror::Error;

/// Failures raised by the algebra kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("ring mismatch: operands belong to different variable rings")]
    RingMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter `{0}` is not bound to a numeric value")]
    UnboundParameter(String),
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("pole: denominator magnitude {0:e} below threshold")]
    Pole(f64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;
