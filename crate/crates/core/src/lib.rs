//! Exact analysis of the two-player Zeckendorf game.
//!
//! Players alternately act on a multiset of Fibonacci tokens, starting from
//! `N` copies of `F_1 = 1`, by combining consecutive tokens or splitting a
//! pair of equal tokens. Every game ends at the Zeckendorf decomposition of
//! `N`. The crate builds extremal games, computes exact length distributions
//! under the uniform and random-play measures, and analyses the partition
//! classes that explain where length variation comes from.
//!
//! Fibonacci numbers use the shifted indexing `F_1 = 1, F_2 = 2`.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod numerics;
pub mod partitions;
pub mod rng;
pub mod stats;
pub mod strategies;
pub mod verify;

pub use engine::{validate_game, Game, GameState, Move, MoveCounts, MoveKind, Replay};
pub use error::{Error, Result};
pub use numerics::{catalan, fib, fib_index, zeckendorf, ZeckDecomposition};
