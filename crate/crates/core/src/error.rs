use thiserror::Error;

use crate::temporal::NodeId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: start {start} must be strictly before end {end}")]
    InvalidInterval { start: i64, end: i64 },
    #[error("window length and stride must be positive with stride <= window length (got window {window}, stride {stride})")]
    InvalidWindow { window: i64, stride: i64 },
    #[error("modularity is undefined on a snapshot without edges")]
    UndefinedModularity,
    #[error("partition has no label for node {0}")]
    IncompletePartition(NodeId),
    #[error("snapshot has no nodes")]
    EmptySnapshot,
    #[error("cannot rewire a graph with {0} edges (need at least 2)")]
    CannotRewire(usize),
    #[error("need at least 2 null samples, got {0}")]
    TooFewSamples(usize),
    #[error("node sets differ; use unmi or inmi to compare partitions over different nodes")]
    NodeSetMismatch,
    #[error("partition is empty")]
    EmptyPartition,
    #[error("node sets do not intersect")]
    EmptyIntersection,
    #[error("need at least 2 partitions, got {0}")]
    TooFewPartitions(usize),
    #[error("no free label left for the virtual community")]
    LabelOverflow,
    #[error("node {0} is assigned more than once")]
    DuplicateNode(NodeId),
    #[error("node tokens must be non-empty")]
    EmptyToken,
    #[error("event refers to unknown node {0}")]
    UnknownNode(NodeId),
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(&'static str),
}
