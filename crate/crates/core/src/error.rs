use crate::graph::{Color, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("loop at vertex {0}")]
    Loop(VertexId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("missing edge {{{0}, {1}}}")]
    MissingEdge(VertexId, VertexId),
    #[error("color {color} outside 1..={k}")]
    InvalidColor { color: Color, k: Color },
    #[error("vertex {0} is not isolated")]
    NotIsolated(VertexId),
    #[error("in-degree cap {cap} cannot be restored at level {level}; the graph left its sparsity class")]
    CapInfeasible { level: usize, cap: usize },
    #[error("augmentation level {0} out of range")]
    LevelOutOfRange(usize),
    #[error("pattern has {size} vertices, limit is {limit}")]
    PatternTooLarge { size: usize, limit: usize },
    #[error("augmented pattern set exceeds {limit} members")]
    TooManyMembers { limit: usize },
    #[error("pattern is not elder")]
    NotElder,
    #[error("pattern is not connected")]
    NotConnected,
    #[error("pattern compiler invariant violated: {0}")]
    CompileInvariant(String),
    #[error("unknown pattern {0:?}")]
    UnknownPattern(String),
    #[error("host graph has {size} vertices, oracle limit is {limit}")]
    OracleLimit { size: usize, limit: usize },
}
