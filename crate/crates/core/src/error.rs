use thiserror::Error;

use crate::complex::Simplex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no top simplices given")]
    EmptyComplex,
    #[error("top simplex {index} has {found} vertices, expected {expected}")]
    InconsistentSimplexSize { index: usize, expected: usize, found: usize },
    #[error("duplicate top simplex {0}")]
    DuplicateSimplex(Simplex),
    #[error("simplex has repeated vertex {0}")]
    RepeatedVertex(usize),
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("dimension {k} out of range for this operation (allowed {min}..={max})")]
    LevelOutOfRange { k: isize, min: isize, max: isize },
    #[error("cochain level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: isize, found: isize },
    #[error("cochain has {found} values but level {level} has {expected} simplices")]
    CochainLength { level: isize, expected: usize, found: usize },
    #[error("weight must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("expected {expected} top weights, got {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight function is not balanced at level {level} (relative residual {residual:e})")]
    Unbalanced { level: isize, residual: f64 },
    #[error("vertex {0} belongs to more than one set")]
    OverlappingSets(usize),
    #[error("top simplices are not connected through shared codimension-one faces")]
    AmbiguousPartition,
    #[error("complex is not partite")]
    NotPartite,
    #[error("set {set} is not contained in side {set} of the partition")]
    SetOutsideSide { set: usize },
    #[error("link of {0} is disconnected")]
    DisconnectedLink(Simplex),
    #[error("operator is not self-adjoint for the weighted inner product (residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("operator shape mismatch: {0}")]
    Shape(String),
    #[error("eigensolver did not converge")]
    EigenNoConvergence,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("generator failed after {0} retries")]
    RetriesExhausted(usize),
    #[error("integer overflow evaluating constant for n = {0}")]
    Overflow(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
