use thiserror::Error;

use crate::rational::ParseRatError;

/// Errors raised by problem construction, rule evaluation and the harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative coordinate {0}")]
    NegativeCoordinate(String),
    #[error("degenerate problem: every generator has coordinate {0} equal to zero")]
    DegenerateProblem(usize),
    #[error("scale vector must be strictly positive")]
    NonpositiveScale,
    #[error("shift must be strictly positive")]
    NonpositiveShift,
    #[error("point {0} is not in the problem")]
    PointNotInProblem(String),
    #[error("weight vector {0} is not in the probability simplex")]
    NotInSimplex(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("bad norm: {0}")]
    BadNorm(String),
    #[error("objective is not weakly monotone: {0}")]
    MonotonicityViolation(String),
    #[error("objective is not monotone on boxes, corner maximization does not apply: {0}")]
    NonMonotoneObjective(String),
    #[error("precision unavailable: {0}")]
    PrecisionUnavailable(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("bad instance: {0}")]
    BadInstance(String),
    #[error("grid budget exceeded: {points} points > {limit}")]
    BudgetExceeded { points: u128, limit: u128 },
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<ParseRatError> for Error {
    fn from(e: ParseRatError) -> Error {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
