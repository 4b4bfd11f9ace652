//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced while loading, detecting, mining, or comparing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A line of an input file could not be tokenized or its fields parsed.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// Structurally well-formed input that violates a model constraint
    /// (non-positive weight, self-loop, inconsistent bounds, sigma < 1, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// A node, dimension, or item code that is not present in the registry
    /// or catalog it was looked up in.
    #[error("lookup failed: {0}")]
    Lookup(String),

    /// A fixed community table does not cover every node of the slice it is
    /// applied to.
    #[error("fixed assignment does not cover node {0}")]
    Coverage(String),

    /// Two community assignments were supplied for the same dimension.
    #[error("duplicate assignment for dimension {0}")]
    DuplicateDimension(String),

    /// The exhaustive miner refuses databases over its item-count guard.
    #[error("brute-force miner limited to {limit} items, got {count}")]
    TooManyItems { count: usize, limit: usize },

    /// Community density is undefined for fewer than two nodes.
    #[error("community density undefined for {nodes} node(s)")]
    UndefinedDensity { nodes: usize },

    /// Comparison ratios are undefined when both community sets are empty.
    #[error("comparison undefined: both community sets are empty")]
    UndefinedRatio,
}
