use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: usize, n: usize },

    #[error("({0}, {0}) is not a pair")]
    SelfPair(usize),

    #[error("pair ({x}, {y}) is not open")]
    NotOpen { x: usize, y: usize },

    #[error("pair ({x}, {y}) is not in G'")]
    NotInGPrime { x: usize, y: usize },

    #[error("probability {0} outside [0, 1)")]
    BadProbability(f64),

    #[error("open layer is empty")]
    EmptyOpenLayer,

    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("pair ({x}, {y}) appears in both H and K")]
    OverlappingPairSets { x: usize, y: usize },

    #[error("graph has {n} vertices, above the exact-solver limit of {limit}; use the heuristic solver")]
    TooLargeForExact { n: usize, limit: usize },

    #[error("average degree {avg:.3} is below the floor {floor:.3}")]
    BelowDegreeFloor { avg: f64, floor: f64 },

    #[error("degree must exceed 1, got {0}")]
    DegreeTooSmall(f64),

    #[error("certificate refused: triangle ({a}, {b}, {c})")]
    TriangleFound { a: usize, b: usize, c: usize },

    #[error("certificate refused: independent set of size {size} >= k = {k}")]
    IndependentSetTooLarge { size: usize, k: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
