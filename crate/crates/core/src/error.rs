use thiserror::Error;

use crate::triangulation::ArcId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("unknown arc {0}")]
    UnknownArc(ArcId),
    #[error("arc {0} is not flippable")]
    Unflippable(ArcId),
    #[error("cut set is empty or names arcs that are not interior arcs of the triangulation")]
    EmptyCut,
    #[error("vertices are not adjacent")]
    NotAdjacent,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("view is incomplete: {0}")]
    IncompleteView(String),
    #[error("target vertex is unreachable")]
    Unreachable,
    #[error("flip is not a cylinder flip")]
    NotCylinderFlip,
    #[error("surface is exceptional")]
    ExceptionalSurface,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("domain view has no vertex of maximal degree with a complete link")]
    DegreeDeficientDomain,
    #[error("invariant multiarc violated at domain vertex {vertex}")]
    InvarianceViolation { vertex: usize },
    #[error("induced arc is not unique for domain arc {arc}")]
    AmbiguousInducedArc { arc: usize },
    #[error("moving arcs split across components: {0}")]
    SplitViolation(String),
    #[error("coordinate underflow while transporting: {0}")]
    CoordinateUnderflow(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
}
