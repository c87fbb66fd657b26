//! Seeded samplers for both measures.
//!
//! Games are produced in batches of [`BATCH_SIZE`]; batch `b` draws from
//! ChaCha8 substream `b` of the seed. The output for a given seed and count
//! is therefore the same for any number of worker threads.

use num_bigint::BigUint;
use rayon::prelude::*;

use super::graph::StateGraph;
use super::{Limits, MeasureKind};
use crate::engine::{Game, GameState, Move, MoveCounts};
use crate::error::{Error, Result};
use crate::numerics::fib_index;
use crate::rng::{stream_rng, uniform_below, uniform_below_big, Rng};

pub const BATCH_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub measure: MeasureKind,
    pub seed: u64,
    pub count: usize,
    pub threads: usize,
}

enum Player {
    Random { n: u64, bins: usize },
    Uniform { graph: StateGraph, counts: Vec<BigUint> },
}

#[inline]
fn nth_set_bit(mut x: u64, r: u32) -> u32 {
    for _ in 0..r {
        x &= x - 1;
    }
    x.trailing_zeros()
}

/// Random play with per-bin legality bitmasks, for boards of at most 64 bins.
/// Bit `k` of `cm` (`sm`) is set when `C_k` (`S_k`) is legal.
fn play_random_masked(n: u64, bins: usize, rng: &mut Rng, visit: &mut impl FnMut(Move)) {
    let mut h = [0u64; 67];
    h[1] = n;
    let mut cm = 0u64;
    let mut sm = 0u64;
    let refresh = |h: &[u64; 67], cm: &mut u64, sm: &mut u64, j: usize| {
        let c = if j == 1 { h[1] >= 2 } else { h[j - 1] > 0 && h[j] > 0 };
        let s = j >= 2 && h[j] >= 2;
        *cm = (*cm & !(1 << j)) | (u64::from(c) << j);
        *sm = (*sm & !(1 << j)) | (u64::from(s) << j);
    };
    for j in 1..bins {
        refresh(&h, &mut cm, &mut sm, j);
    }
    loop {
        let c = cm.count_ones();
        let total = c + sm.count_ones();
        if total == 0 {
            break;
        }
        let r = uniform_below(rng, u64::from(total)) as u32;
        let m = if r < c {
            let k = nth_set_bit(cm, r) as usize;
            if k == 1 {
                h[1] -= 2;
                h[2] += 1;
            } else {
                h[k - 1] -= 1;
                h[k] -= 1;
                h[k + 1] += 1;
            }
            Move::combine(k as u32)
        } else {
            let k = nth_set_bit(sm, r - c) as usize;
            h[k] -= 2;
            h[k + 1] += 1;
            if k == 2 {
                h[1] += 1;
            } else {
                h[k - 2] += 1;
            }
            Move::split(k as u32)
        };
        visit(m);
        let k = m.index as usize;
        for j in k.saturating_sub(2).max(1)..=(k + 2).min(bins - 1) {
            refresh(&h, &mut cm, &mut sm, j);
        }
    }
}

fn play_random_generic(n: u64, rng: &mut Rng, visit: &mut impl FnMut(Move)) {
    let mut s = GameState::initial(n).expect("n >= 1");
    loop {
        let legal = s.legal_moves();
        if legal.is_empty() {
            break;
        }
        let m = legal[uniform_below(rng, legal.len() as u64) as usize];
        s.apply_unchecked(m);
        visit(m);
    }
}

impl Player {
    fn new(n: u64, measure: MeasureKind, limits: &Limits) -> Result<Self> {
        let bins = fib_index(n)?;
        Ok(match measure {
            MeasureKind::RandomPlay => Player::Random { n, bins },
            MeasureKind::Uniform => {
                let graph = StateGraph::build(n, limits.state_budget)?;
                let counts = graph.game_counts();
                Player::Uniform { graph, counts }
            }
        })
    }

    fn play(&self, rng: &mut Rng, visit: &mut impl FnMut(Move)) {
        match self {
            Player::Random { n, bins } if *bins <= 64 => play_random_masked(*n, *bins, rng, visit),
            Player::Random { n, .. } => play_random_generic(*n, rng, visit),
            Player::Uniform { graph, counts } => {
                let mut id = graph.root();
                loop {
                    let kids = graph.children(id);
                    if kids.is_empty() {
                        break;
                    }
                    let mut r = uniform_below_big(rng, &counts[id as usize]);
                    let mut next = kids[kids.len() - 1];
                    for &(m, c) in kids {
                        let w = &counts[c as usize];
                        if &r < w {
                            next = (m, c);
                            break;
                        }
                        r -= w;
                    }
                    visit(next.0);
                    id = next.1;
                }
            }
        }
    }
}

fn run_batches<T: Send>(
    n: u64,
    cfg: &SampleConfig,
    limits: &Limits,
    per_game: impl Fn(&Player, &mut Rng) -> T + Sync,
) -> Result<Vec<T>> {
    let player = Player::new(n, cfg.measure, limits)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let batches = cfg.count.div_ceil(BATCH_SIZE);
    let out: Vec<Vec<T>> = pool.install(|| {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = stream_rng(cfg.seed, b as u64);
                let size = BATCH_SIZE.min(cfg.count - b * BATCH_SIZE);
                (0..size).map(|_| per_game(&player, &mut rng)).collect()
            })
            .collect()
    });
    Ok(out.into_iter().flatten().collect())
}

/// Lengths of `cfg.count` sampled games.
pub fn sample_lengths(n: u64, cfg: &SampleConfig, limits: &Limits) -> Result<Vec<u64>> {
    run_batches(n, cfg, limits, |p, rng| {
        let mut len = 0u64;
        p.play(rng, &mut |_| len += 1);
        len
    })
}

/// Move counts of `cfg.count` sampled games.
pub fn sample_counts(n: u64, cfg: &SampleConfig, limits: &Limits) -> Result<Vec<MoveCounts>> {
    let bins = fib_index(n)?;
    run_batches(n, cfg, limits, |p, rng| {
        let mut c = MoveCounts::new(bins);
        p.play(rng, &mut |m| c.record(m));
        c
    })
}

/// `cfg.count` sampled games.
pub fn sample_games(n: u64, cfg: &SampleConfig, limits: &Limits) -> Result<Vec<Game>> {
    run_batches(n, cfg, limits, |p, rng| {
        let mut moves = Vec::new();
        p.play(rng, &mut |m| moves.push(m));
        Game::from_trusted(n, moves)
    })
}
