use thiserror::Error;

use crate::engine::Move;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be a positive integer, got {0}")]
    NonPositiveInput(u64),

    #[error("illegal move {mv}{}: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    IllegalMove {
        /// 1-based position in the replayed game, when known.
        step: Option<usize>,
        mv: Move,
        reason: &'static str,
    },

    #[error("game ended with {remaining} legal move(s) still available")]
    NonTerminalEnd { remaining: usize },

    #[error("invalid target decomposition: {0}")]
    InvalidTarget(String),

    #[error("{0} is not of the form F_k - 1, so no game uses only split and C1 moves")]
    NotTypeAExpressible(u64),

    #[error("no game on {n} has length {m}; achievable lengths are [{lo}, {hi}]")]
    LengthOutOfRange { n: u64, m: u64, lo: u64, hi: u64 },

    #[error("construction of a length-{m} game on {n} failed within the search budget")]
    SearchExhausted { n: u64, m: u64 },

    #[error("reachable state count exceeds the budget of {limit}")]
    StateBudgetExceeded { limit: usize },

    #[error("enumeration of all games on {n} exceeds the cap of {cap}")]
    EnumerationCapExceeded { n: u64, cap: u64 },

    #[error("game is not a fixed point of the representative map")]
    NotARepresentative,

    #[error("distribution has zero variance")]
    ZeroVariance,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
