use thiserror::Error;

/// Errors produced by the acsp solvers and data model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two consecutive walk vertices are not joined by an edge.
    #[error("no edge between vertices {} and {}", .0 + 1, .1 + 1)]
    MissingEdge(usize, usize),

    #[error("vertex {} is out of range (n = {n})", .vertex + 1)]
    VertexOutOfRange { vertex: usize, n: usize },

    /// The instance admits no feasible walk, or a walk does not cover every color.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The product-state search would need more color bits than supported.
    #[error("too many colors for exact search: {0}")]
    TooManyColors(usize),

    #[error("malformed directed walk: {0}")]
    MalformedDirectedWalk(String),

    #[error("walk extraction failed: {0}")]
    Extraction(String),

    /// Iterative rounding could not continue after `iteration` fixing rounds.
    #[error("rounding failed after {iteration} fixing rounds: {reason}")]
    Rounding { iteration: usize, reason: String },

    #[error("lp usage error: {0}")]
    LpUsage(String),

    /// A step cap guarding random construction was exhausted.
    #[error("step limit of {0} exhausted")]
    StepLimit(usize),

    #[error("every ant was discarded")]
    AllAntsDiscarded,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
