use thiserror::Error;

use crate::structure::RectangularityWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range for a digraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("digraph is not rectangular: {0}")]
    NotRectangular(RectangularityWitness),

    #[error("digraph is not Maltsev: level {level} violates rectangularity at {witness}")]
    NotMaltsev {
        level: usize,
        witness: RectangularityWitness,
    },

    #[error("digraph is not a base case (disjoint union of cycles, edgeless or null)")]
    NotBaseCase,

    #[error("operation size {got} does not match expected domain size {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty candidate set while lifting at triple ({}, {}, {})", .triple[0], .triple[1], .triple[2])]
    EmptyCandidates { triple: [usize; 3] },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
