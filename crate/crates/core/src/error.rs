use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("genus must be at least 2, got {0}")]
    InvalidGenus(usize),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("malformed complex: {0}")]
    Format(String),
    #[error("word represents the trivial element")]
    TrivialElement,
    #[error("{what} exceeded budget of {budget}")]
    BudgetExceeded { what: &'static str, budget: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
