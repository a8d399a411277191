use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("invalid vertex label {0:?}")]
    InvalidLabel(String),
    #[error("unparsable rational {0:?}")]
    BadRational(String),
    #[error("vertex {b0} is not a neighbor of {vertex}")]
    NotNeighbor { vertex: VertexId, b0: VertexId },
    #[error("symplectic matrix for vertex {0} does not have determinant 1")]
    NotSymplectic(VertexId),
    #[error("outcome {given} contradicts the deterministic value {forced}")]
    InconsistentOutcome { given: String, forced: String },
    #[error("outcome {0} is not numeric")]
    NonNumericOutcome(String),
    #[error("invalid measurement action {0:?}: {1}")]
    BadAction(String, String),
    #[error("mode sets differ")]
    ModeMismatch,
    #[error("singular conditioning block while measuring {0}")]
    SingularConditioning(VertexId),
    #[error("malformed document: {0}")]
    Json(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
