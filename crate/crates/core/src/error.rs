use thiserror::Error;

use crate::tower::{Block, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid tower: {}", join(.0))]
    InvalidTower(Vec<Violation>),

    #[error("block {0} is not part of the tower")]
    BlockNotFound(Block),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("negative upper index {0} in binomial coefficient")]
    NegativeUpperIndex(i64),

    #[error("zero denominator: ({c})_{m} vanishes")]
    ZeroDenominator { c: String, m: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed tower json: {0}")]
    Json(String),

    #[error("{0}")]
    Precondition(String),

    #[error("round trip failed: {0}")]
    RoundTrip(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
