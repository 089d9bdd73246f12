use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("invalid modification: {0}")]
    InvalidModification(String),
    #[error("malformed graph json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("ancestor cone of vertex {vertex} has {size} members, above the exact-engine cap of {cap}")]
    ConeCapExceeded { vertex: Vertex, size: usize, cap: usize },
    #[error("exhaustive enumeration requested for n = {n}, above the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("ordering predicate never satisfied in {attempts} sampled orderings")]
    PredicateNeverSatisfied { attempts: usize },
    #[error("target vertex {0} is deleted by the modification list")]
    TargetDeleted(Vertex),
    #[error("greedy loop ran {iterations} iterations without reaching the coverage target")]
    GreedyDiverged { iterations: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
