use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: usize, reason: &'static str },

    #[error("malformed square: {0}")]
    MalformedSquare(String),

    #[error("dimension mismatch: expected order {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("square is not associative")]
    NotAssociative,

    #[error("invalid value set: {0}")]
    InvalidValueSet(String),

    #[error("invalid split pair: {0}")]
    InvalidPair(String),

    #[error("canonical mode is only defined for order 7 (got {0})")]
    CanonicalOrder(usize),

    #[error("search budget exceeded after {nodes} nodes ({elapsed_ms} ms)")]
    BudgetExceeded { nodes: u64, elapsed_ms: u128 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("checkpoint digest mismatch: expected {expected}, found {found}")]
    DigestMismatch { expected: String, found: String },

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("family cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("run interrupted after {completed} records")]
    Interrupted { completed: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
