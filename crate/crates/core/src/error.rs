use thiserror::Error;

use crate::graph::{EdgeId, Vertex, VertexSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{0} vertices exceeds the 64-vertex limit")]
    TooManyVertices(usize),
    #[error("edge ({u}, {v}) out of range for {n} vertices")]
    VertexOutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {edge} has negative cost {cost}")]
    NegativeCost { edge: usize, cost: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RequirementError {
    #[error("requirement table has no entry for {0}")]
    IncompleteTable(VertexSet),
    #[error("requirement must vanish on the empty set and the ground set, but f({0}) = 1")]
    NonzeroBoundary(VertexSet),
    #[error("ground set of {size} vertices exceeds the brute-force cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("{0} refers to a vertex outside the ground set")]
    OutOfGround(String),
    #[error("self-loop ({0}, {0}) in requirement edges")]
    SelfLoop(Vertex),
    #[error("minimally violated sets {0} and {1} overlap; requirement is not uncrossable")]
    NotUncrossable(VertexSet, VertexSet),
    #[error("{method} requires a {expected} requirement")]
    WrongFlavor { method: &'static str, expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Requirement(#[from] RequirementError),
    #[error("requirement is not proper: {0}")]
    NotProper(String),
    #[error("instance is infeasible: violated set {0} has no uncovered crossing edge")]
    Infeasible(VertexSet),
    #[error("edge set given to reverse delete is infeasible: {0} is violated")]
    InfeasibleInput(VertexSet),
    #[error("edge {edge} reached negative reduced cost {reduced} at time {time}")]
    NegativeReducedCost { edge: EdgeId, reduced: Rational, time: Rational },
    #[error("graph has {graph} vertices but requirement ground set has {oracle}")]
    GroundMismatch { graph: usize, oracle: usize },
}
