//! Exact length distributions, achievable-length sets, residue odds,
//! exhaustive enumeration, samplers and shortest-game counting.

mod dist;
mod enumerate;
mod graph;
mod sampler;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use dist::{
    achievable_length_set, game_probability, length_distribution, length_distribution_on,
    mod_z_distribution, ratio_f64, shortest_game_count, LengthDistribution, Residues, ShortestCount,
    Weights,
};
pub use enumerate::{enumerate_games, Games};
pub use graph::StateGraph;
pub use sampler::{sample_counts, sample_games, sample_lengths, SampleConfig, BATCH_SIZE};

/// Probability measure on the set of complete games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    /// Every complete game equally likely.
    Uniform,
    /// Each move chosen uniformly among the legal moves.
    RandomPlay,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 2] = [MeasureKind::Uniform, MeasureKind::RandomPlay];

    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Uniform => "uniform",
            MeasureKind::RandomPlay => "random",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeasureKind::Uniform),
            "random" | "random-play" => Ok(MeasureKind::RandomPlay),
            _ => Err(Error::Parse(format!("unknown measure {s:?}"))),
        }
    }
}

impl Serialize for MeasureKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Resource limits for the exact engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Maximum number of reachable boards a DP may visit.
    pub state_budget: usize,
    /// Largest input for which every game is enumerated.
    pub enumeration_cap: u64,
    /// Denominator size, in bits, beyond which random-play weights switch
    /// from exact rationals to doubles.
    pub denominator_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            state_budget: 10_000_000,
            enumeration_cap: 14,
            denominator_bits: 4096,
        }
    }
}

impl Limits {
    /// Defaults, with the state budget taken from `ZECKGAME_STATE_BUDGET`
    /// when that variable holds a positive integer.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Some(b) = std::env::var("ZECKGAME_STATE_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&b| b > 0)
        {
            l.state_budget = b;
        }
        l
    }
}
