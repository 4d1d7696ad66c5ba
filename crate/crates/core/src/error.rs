use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(usize, usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partitions cover different node sets ({0} vs {1} nodes)")]
    NodeSetMismatch(usize, usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible generation: {0}")]
    Infeasible(String),

    #[error("target mixing {mu} exceeds the limit {limit} for this community structure")]
    MixingAboveLimit { mu: f64, limit: f64 },

    #[error("modularity undefined for a graph without edges")]
    EdgelessGraph,

    #[error("all nodes are isolated")]
    AllIsolated,

    #[error("zero variance in input sequence")]
    ZeroVariance,

    #[error("sequence lengths differ or are too short ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("empty dendrogram")]
    EmptyDendrogram,

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
