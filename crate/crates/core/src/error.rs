use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Vertex ids are stored 0-based but displayed 1-based, matching the
/// external file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("{0} is not a prime (supported moduli are primes below 2^32)")]
    NotPrime(u64),
    #[error("invalid scalar literal {literal:?}: {reason}")]
    Scalar { literal: String, reason: String },

    #[error("vertex {} out of range for {n} vertices", .vertex + 1)]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop edge at vertex {}", .0 + 1)]
    LoopEdge(usize),
    #[error("duplicate edge {{{}, {}}}", .0 + 1, .1 + 1)]
    DuplicateEdge(usize, usize),
    #[error("pattern contains a cycle through edge {{{}, {}}}", .0 + 1, .1 + 1)]
    Cycle(usize, usize),
    #[error("vertices {} and {} lie in different components", .0 + 1, .1 + 1)]
    DifferentComponents(usize, usize),
    #[error("second vertex of a path from {} to itself is undefined", .0 + 1)]
    TrivialPath(usize),

    #[error("nonzero diagonal entry at ({}, {})", .0 + 1, .0 + 1)]
    NonzeroDiagonal(usize),
    #[error("asymmetric pattern: entry ({}, {}) is nonzero but ({}, {}) is not", .0 + 1, .1 + 1, .1 + 1, .0 + 1)]
    AsymmetricPattern(usize, usize),
    #[error("explicit zero entry at ({}, {})", .0 + 1, .1 + 1)]
    ExplicitZero(usize, usize),
    #[error("duplicate entry at ({}, {})", .0 + 1, .1 + 1)]
    DuplicateEntry(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrices do not share a sparsity pattern")]
    PatternMismatch,

    #[error("vertex {} is not in the null support", .0 + 1)]
    NotInSupport(usize),
    #[error("vertex {} is in the null support", .0 + 1)]
    InSupport(usize),
    #[error("not a supp-transversal: {0}")]
    NotTransversal(String),
    #[error("vector is not in the null space of the source matrix")]
    NotInNullSpace,
    #[error("vector is not in the row space of the source matrix")]
    NotInRowSpace,

    #[error("oracle bound exceeded: n = {n} > {bound}")]
    OracleBound { n: usize, bound: usize },
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
