use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("start vertex {0} is isolated and the walk is not lazy")]
    IsolatedStart(usize),

    #[error("graph has no edges")]
    Edgeless,

    #[error("exact enumeration needs {needed} subsets, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("graph on {n} vertices exceeds the exact-mode cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("not a Hamilton path: {0}")]
    NotHamiltonPath(String),

    #[error("vertex {vertex} has {degree} incident edges, fewer than d0 = {d0}")]
    DegreeBelowThreshold { vertex: usize, degree: usize, d0: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
