use thiserror::Error;

use crate::chimera::ChimeraNode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} is outside the topology bounds")]
    OutOfBounds(ChimeraNode),
    #[error("node {0} is broken")]
    BrokenNode(ChimeraNode),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("representation rejected: {0}")]
    BadRepresentation(String),
    #[error("element decomposition failed near {region}: {reason}")]
    DecompositionFailed { region: String, reason: String },
    #[error("gadget search exhausted after {0} candidates")]
    SearchExhausted(usize),
    #[error("gadget fixture invalid: {0}")]
    InvalidGadget(String),
    #[error("tentacle end patterns overlap: {0}")]
    PatternOverlap(String),
    #[error("cannot choose a rotation for vertex {0}: {1}")]
    RotationUnderdetermined(String, String),
    #[error("path construction failed: {0}")]
    ConstructionFailed(String),
    #[error("traversal plan infeasible: {0}")]
    PlanInfeasible(String),
    #[error("cycle usage inconsistent with the composed graph: {0}")]
    InconsistentUsage(String),
    #[error("contraction would collapse a graph with {0} vertices")]
    TriangleCollapse(usize),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unsupported depth {0}; gadget data exists for depth 4 only")]
    UnsupportedDepth(usize),
    #[error("no grid representation found: {0}")]
    EmbeddingFailed(String),
    #[error("search budget exhausted: {0}")]
    Timeout(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
