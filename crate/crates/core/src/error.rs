use thiserror::Error;

use crate::model::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a star forest needs at least one component")]
    EmptyForest,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("malformed vertex key {0:?}, expected \"component.slot\"")]
    BadVertexKey(String),
    #[error("vertex {0} is not part of the forest")]
    UnknownVertex(VertexId),
    #[error("vertex {0} has no list")]
    MissingList(VertexId),
    #[error("vertex {0} has an empty list")]
    EmptyList(VertexId),
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("the assignment or coloring was built for a different forest")]
    ShapeMismatch,
    #[error("not a {k}-assignment: vertex {vertex} has {size} colors")]
    NotKAssignment { k: usize, vertex: VertexId, size: usize },
    #[error("color {color} is not in the list of vertex {vertex}")]
    ColorNotInList { vertex: VertexId, color: u32 },
    #[error("palette size {palette} is smaller than k = {k}")]
    PaletteTooSmall { palette: usize, k: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
