use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QdcError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate evaluation point p = {0} (q must be generic)")]
    DegeneratePoint(String),
    #[error("evaluation hit a pole at {0}")]
    Pole(String),
    #[error("invalid dimension N = {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands built for different N ({0} vs {1})")]
    MixedN(usize, usize),
    #[error("polynomial is not of homogeneous parity")]
    InhomogeneousParity,
    #[error("substitution for {0} changes parity")]
    ParityViolation(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("relation family {family} cannot be oriented: {reason}")]
    Unorientable { family: String, reason: String },
    #[error("reduction exceeded the step cap of {0} rule applications")]
    StepCapExceeded(u64),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: i64, n: usize },
    #[error("presentation {0} is not available at N = {1}")]
    Unavailable(String, usize),
    #[error("time budget exceeded")]
    BudgetExceeded,
    #[error("unknown name: {0}")]
    Unknown(String),
}

pub type Result<T> = std::result::Result<T, QdcError>;
