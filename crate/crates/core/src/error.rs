use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(i32, i32),
    #[error("term of degree {degree} outside the window [{lower}, {upper}]")]
    DegreeWindow { degree: i32, lower: i32, upper: i32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inadmissible weight: {0}")]
    InadmissibleWeight(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("insufficient jet order: need {needed}, have {available}")]
    InsufficientOrder { needed: u32, available: u32 },
    #[error("iteration did not close within the truncation budget: {0}")]
    IterationBudget(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
