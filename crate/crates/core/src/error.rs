use thiserror::Error;

use crate::enclosure::Ball;

/// A caller supplied a value outside an operation's domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid argument: {message}")]
pub struct ArgumentError {
    message: String,
}

impl ArgumentError {
    pub fn new(message: impl Into<String>) -> Self {
        ArgumentError { message: message.into() }
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

#[derive(Debug, Clone, Error)]
pub enum EnclosureError {
    #[error("denominator ball {0} contains zero")]
    DivisionByZeroStraddle(String),
    #[error("base ball {0} is not strictly positive")]
    NonPositiveBase(String),
    /// Refinement hit the precision cap; carries the tightest ball obtained.
    #[error("precision exhausted at {bits} bits with radius {}", ball.radius_f64())]
    PrecisionExhausted { ball: Box<Ball>, bits: u32 },
    #[error(transparent)]
    Argument(#[from] ArgumentError),
}

/// Outcome of a certified comparison that could not be separated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("undecided at {bits} bits: {what}")]
pub struct Undecided {
    pub what: String,
    pub bits: u32,
}

#[derive(Debug, Clone, Error)]
pub enum CheckError {
    #[error(transparent)]
    Undecided(#[from] Undecided),
    #[error(transparent)]
    Enclosure(#[from] EnclosureError),
    #[error(transparent)]
    Argument(#[from] ArgumentError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("{count} p-th powers found in the gap at n = {n}")]
    MultipleWitnesses { n: u64, count: usize },
    #[error(transparent)]
    Argument(#[from] ArgumentError),
}
