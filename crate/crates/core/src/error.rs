use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "dimensionality constraint violated: need {needed} null-space dimensions, only {available} available"
    )]
    Dimensionality { needed: usize, available: usize },

    #[error("user index {index} out of range for {k_users} users")]
    UserIndex { index: usize, k_users: usize },

    #[error("degenerate channel: all eigenvalues are zero")]
    DegenerateChannel,

    #[error("equivalent channel is numerically rank deficient (rank {rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("{formula} is not valid here: {reason}")]
    Regime { formula: &'static str, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("numerical method did not converge: {0}")]
    NoConvergence(String),

    #[error("output error: {0}")]
    Output(String),

    #[error("too many discarded trials: {discarded} of {trials}")]
    DiscardRate { discarded: usize, trials: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
