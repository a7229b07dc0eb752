use thiserror::Error;

/// Errors raised by the engines. Budget exhaustion is not an error: it is
/// reported through [`crate::TriState::Unknown`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("adjacency is only defined for distinct points, got {0} twice")]
    SamePoint(String),

    #[error("invalid adjacency: dim {dim}, k {k} (need 1 <= k <= dim)")]
    InvalidAdjacency { dim: usize, k: usize },

    #[error("duplicate point {0}")]
    DuplicatePoint(String),

    #[error("an image needs at least one point")]
    EmptyImage,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no simple closed curve with {m} points exists under {adjacency}-adjacency")]
    NoSuchCurve { m: usize, adjacency: usize },

    #[error("resource limit exceeded while {what}: limit {limit}, reached {reached}")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        reached: usize,
    },

    #[error("image is not connected")]
    Disconnected,

    #[error("invalid input: {0}")]
    Input(String),

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
