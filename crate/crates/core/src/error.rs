use crate::graph::{EdgeId, Vertex};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("edge id {edge} out of range for graph with {m} edges")]
    EdgeOutOfRange { edge: EdgeId, m: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("path endpoints do not match: {left_end} vs {right_start}")]
    PathMismatch { left_end: Vertex, right_start: Vertex },

    #[error("cannot concatenate an empty path")]
    EmptyPath,

    #[error("vertex set is not strongly connected in the given graph")]
    NotStronglyConnected,

    #[error("subgraph does not belong to the given parent graph")]
    NotSubgraph,

    #[error("enumeration budget exceeded: {needed} failure sets needed, cap is {cap}")]
    BudgetExceeded { needed: u128, cap: u64 },

    #[error("order is not a permutation of 0..{n}")]
    InvalidOrder { n: usize },

    #[error("pair ({0}, {1}) has no path to decompose")]
    Unreachable(Vertex, Vertex),

    #[error("edges of the pair preserver are not a union of two paths: {0}")]
    NotDecomposable(String),

    #[error("cannot place {m} edges in a simple digraph on {n} vertices")]
    InfeasibleEdgeCount { n: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all context layers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
