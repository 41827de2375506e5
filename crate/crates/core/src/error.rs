use std::path::PathBuf;

use thiserror::Error;

use crate::population::Tier;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("no edges")]
    NoEdges,

    #[error("degenerate graph: maximum outdegree is 0")]
    DegenerateGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),

    #[error("population has {population} agents but the graph has {graph} vertices")]
    SizeMismatch { population: usize, graph: usize },

    #[error("seed set is empty")]
    EmptySeedSet,

    #[error("tier {0} has no members")]
    EmptyTier(Tier),

    #[error("budget too small: cheapest tier {tier} member costs {cheapest:.2}, budget is {budget:.2}")]
    BudgetTooSmall { tier: Tier, cheapest: f64, budget: f64 },

    #[error("tier {tier} exhausted at {reached} unique followers, needed at least {needed}")]
    TierExhausted { tier: Tier, reached: usize, needed: usize },

    #[error("no trial results to aggregate")]
    NoTrials,

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
