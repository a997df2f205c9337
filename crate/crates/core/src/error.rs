use thiserror::Error;

/// Errors produced while building graphs, estimating concordance, or running inference.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on vertex {label:?}: loops are not allowed")]
    SelfLoop { label: String },

    #[error("graph is empty: no edges and no declared vertices")]
    EmptyGraph,

    #[error("graph is complete: every pair of vertices is adjacent")]
    CompleteGraph,

    #[error(
        "vertex {label:?} is adjacent to all {others} other vertices; its non-neighbor average is undefined"
    )]
    ClosedNeighborhood { label: String, others: usize },

    #[error("vertex id {index} out of range for graph with {n} vertices")]
    Index { index: usize, n: usize },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    #[error("type share is {share}; need at least one vertex of the target type and one of another type")]
    DegenerateType { share: f64 },

    #[error("no vertex of the target type has any edge")]
    NoTypedEdges,

    #[error("inference failed: {0}")]
    Inference(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{count} label(s) could not be aligned to graph vertices: {}", .labels.join(", "))]
    Alignment { count: usize, labels: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that stem from degenerate data rather than bad input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateVariance(_)
                | Error::DegenerateType { .. }
                | Error::NoTypedEdges
                | Error::Inference(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
