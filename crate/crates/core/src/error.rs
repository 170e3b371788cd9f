use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node index {0} not found")]
    NodeNotFound(usize),
    #[error("edge ({0}, {1}) not found")]
    EdgeNotFound(usize, usize),
    #[error("package {0} not found")]
    PackageNotFound(usize),
    #[error("membership covers {found} nodes but the graph has {expected}")]
    InvalidMembership { expected: usize, found: usize },
    #[error("community id {id} out of range (community count {count})")]
    CommunityOutOfRange { id: usize, count: usize },
    #[error("modularity is undefined for a graph without edges")]
    UndefinedModularity,
    #[error("intra-community fraction is undefined for a graph without edges")]
    UndefinedFraction,
    #[error("abstractness is undefined for an empty package")]
    UndefinedAbstractness,
    #[error("abstract class count {abstract_count} exceeds class count {class_count}")]
    InvalidAbstractCount { abstract_count: usize, class_count: usize },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("graph is not symmetric; apply the naive transformation first")]
    NotSymmetric,
    #[error("invalid edge weight {0}")]
    InvalidWeight(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
