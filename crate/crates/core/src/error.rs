use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The estimate is the zero vector; the lemmas behind the deciders
    /// assume `0 <= gamma < ||c||`, which is vacuous for `c = 0`.
    #[error("estimated objective is zero")]
    ZeroEstimate,

    /// The forward feasible set is empty, which makes the inverse problem
    /// vacuous (every objective is feasible).
    #[error("empty feasible set S")]
    EmptyFeasibleSet,

    /// The forward problem is unbounded in a direction generated after the
    /// first cutting-plane iteration.
    #[error("forward problem unbounded in direction generated at iteration {iteration}")]
    UnboundedDirection { iteration: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Safety valve; Bland's rule guarantees this is never hit.
    #[error("pivot limit exceeded")]
    PivotLimit,

    /// Node limit of the branch-and-bound search.
    #[error("search limit exceeded")]
    SearchLimit,

    #[error("internal error: {0}")]
    Internal(String),
}
