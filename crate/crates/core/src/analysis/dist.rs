use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::graph::StateGraph;
use super::{Limits, MeasureKind};
use crate::engine::{Game, GameState};
use crate::error::{Error, Result};
use crate::numerics::{catalan, fib_index, fib_u64};

/// Weights indexed by `length - offset`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Number of games of each length.
    Counts(Vec<BigUint>),
    /// Exact probabilities.
    Exact(Vec<BigRational>),
    /// Probabilities in double precision.
    Approx(Vec<f64>),
}

/// Distribution of the game length under a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthDistribution {
    n: u64,
    measure: MeasureKind,
    offset: u64,
    weights: Weights,
    total_games: Option<BigUint>,
}

pub(crate) fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl LengthDistribution {
    pub fn new(n: u64, measure: MeasureKind, offset: u64, weights: Weights) -> Self {
        let total_games = match &weights {
            Weights::Counts(c) => Some(c.iter().sum()),
            _ => None,
        };
        let mut d = LengthDistribution {
            n,
            measure,
            offset,
            weights,
            total_games,
        };
        d.trim();
        d
    }

    fn trim(&mut self) {
        fn bounds<T>(v: &[T], zero: impl Fn(&T) -> bool) -> (usize, usize) {
            let lo = v.iter().position(|x| !zero(x)).unwrap_or(0);
            let hi = v.iter().rposition(|x| !zero(x)).map_or(lo, |i| i + 1);
            (lo, hi)
        }
        let (lo, hi) = match &self.weights {
            Weights::Counts(v) => bounds(v, Zero::is_zero),
            Weights::Exact(v) => bounds(v, Zero::is_zero),
            Weights::Approx(v) => bounds(v, |x| *x == 0.0),
        };
        match &mut self.weights {
            Weights::Counts(v) => {
                v.truncate(hi);
                v.drain(..lo);
            }
            Weights::Exact(v) => {
                v.truncate(hi);
                v.drain(..lo);
            }
            Weights::Approx(v) => {
                v.truncate(hi);
                v.drain(..lo);
            }
        }
        self.offset += lo as u64;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn measure(&self) -> MeasureKind {
        self.measure
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    /// Smallest length with positive weight.
    pub fn min_length(&self) -> u64 {
        self.offset
    }

    /// Largest length with positive weight.
    pub fn max_length(&self) -> u64 {
        self.offset + self.width().saturating_sub(1) as u64
    }

    fn width(&self) -> usize {
        match &self.weights {
            Weights::Counts(v) => v.len(),
            Weights::Exact(v) => v.len(),
            Weights::Approx(v) => v.len(),
        }
    }

    /// `|Omega_N|` when the weights are counts.
    pub fn total_games(&self) -> Option<&BigUint> {
        self.total_games.as_ref()
    }

    /// `"count"`, `"rational"` or `"double"`.
    pub fn weight_kind(&self) -> &'static str {
        match self.weights {
            Weights::Counts(_) => "count",
            Weights::Exact(_) => "rational",
            Weights::Approx(_) => "double",
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.weights, Weights::Approx(_))
    }

    /// Lengths with positive weight, ascending.
    pub fn support(&self) -> Vec<u64> {
        self.probabilities().into_iter().map(|(l, _)| l).collect()
    }

    /// Exact `(length, probability)` pairs with positive probability.
    pub fn exact_probabilities(&self) -> Option<Vec<(u64, BigRational)>> {
        let off = self.offset;
        match &self.weights {
            Weights::Counts(v) => {
                let total = self.total_games.as_ref()?;
                Some(
                    v.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (off + i as u64, big_ratio(c, total)))
                        .collect(),
                )
            }
            Weights::Exact(v) => Some(
                v.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(i, p)| (off + i as u64, p.clone()))
                    .collect(),
            ),
            Weights::Approx(_) => None,
        }
    }

    /// `(length, probability)` pairs with positive probability.
    pub fn probabilities(&self) -> Vec<(u64, f64)> {
        match &self.weights {
            Weights::Approx(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, &p)| (self.offset + i as u64, p))
                .collect(),
            _ => self
                .exact_probabilities()
                .unwrap_or_default()
                .iter()
                .map(|(l, p)| (*l, ratio_f64(p)))
                .collect(),
        }
    }

    pub fn probability(&self, length: u64) -> f64 {
        self.probabilities()
            .into_iter()
            .find(|&(l, _)| l == length)
            .map_or(0.0, |(_, p)| p)
    }

    /// `P(length = z mod modulus)` for each residue, exactly when possible.
    pub fn residues(&self, modulus: u64) -> Result<Residues> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be at least 1".into()));
        }
        let z = modulus as usize;
        let exact = self.exact_probabilities().map(|ps| {
            let mut r = vec![BigRational::zero(); z];
            for (l, p) in ps {
                r[(l % modulus) as usize] += p;
            }
            r
        });
        let values = match &exact {
            Some(r) => r.iter().map(ratio_f64).collect(),
            None => {
                let mut r = vec![0.0; z];
                for (l, p) in self.probabilities() {
                    r[(l % modulus) as usize] += p;
                }
                r
            }
        };
        Ok(Residues {
            modulus,
            exact,
            values,
        })
    }

    /// `length,weight` rows: integer counts, or decimal probabilities.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length,weight\n");
        match &self.weights {
            Weights::Counts(v) => {
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        out.push_str(&format!("{},{}\n", self.offset + i as u64, c));
                    }
                }
            }
            _ => {
                for (l, p) in self.probabilities() {
                    out.push_str(&format!("{l},{p}\n"));
                }
            }
        }
        out
    }
}

/// Residue probabilities of the game length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residues {
    pub modulus: u64,
    #[serde(serialize_with = "ser_opt_rationals")]
    pub exact: Option<Vec<BigRational>>,
    pub values: Vec<f64>,
}

fn ser_opt_rationals<S: serde::Serializer>(
    v: &Option<Vec<BigRational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_seq(v.iter().map(|r| r.to_string())),
        None => s.serialize_none(),
    }
}

impl Residues {
    /// Probability that the first player makes the last move.
    pub fn player_one_wins(&self) -> f64 {
        if self.modulus == 2 {
            self.values[1]
        } else {
            f64::NAN
        }
    }
}

/// Adds `src`, shifted one length up and scaled by `scale`, into `dst`.
fn accumulate<T: Clone + Zero>(
    dst: &mut Vec<T>,
    dst_off: u64,
    src: &[T],
    src_off: u64,
    scale: impl Fn(&T) -> T,
) {
    let start = (src_off + 1 - dst_off) as usize;
    if dst.len() < start + src.len() {
        dst.resize(start + src.len(), T::zero());
    }
    for (i, w) in src.iter().enumerate() {
        let cur = std::mem::replace(&mut dst[start + i], T::zero());
        dst[start + i] = cur + scale(w);
    }
}

/// Post-order DP over length vectors. `combine` merges the children's
/// vectors into the parent's; returning `false` aborts the whole pass.
fn dp<T: Clone + Zero + One>(
    g: &StateGraph,
    mut combine: impl FnMut(&[(u64, &[T])], &mut Vec<T>, u64) -> bool,
) -> Option<(u64, Vec<T>)> {
    let mut table: Vec<Option<(u64, Vec<T>)>> = vec![None; g.len()];
    for &id in g.post_order() {
        let kids = g.children(id);
        let entry = if kids.is_empty() {
            if g.is_terminal(id) {
                (0, vec![T::one()])
            } else {
                (0, Vec::new())
            }
        } else {
            let parts: Vec<(u64, &[T])> = kids
                .iter()
                .map(|&(_, c)| {
                    let (o, v) = table[c as usize].as_ref().expect("children first");
                    (*o, v.as_slice())
                })
                .collect();
            let off = parts.iter().map(|p| p.0).min().unwrap_or(0) + 1;
            let mut acc = Vec::new();
            if !combine(&parts, &mut acc, off) {
                return None;
            }
            (off, acc)
        };
        table[id as usize] = Some(entry);
    }
    table[g.root() as usize].take()
}

fn uniform_dp(g: &StateGraph) -> (u64, Vec<BigUint>) {
    dp::<BigUint>(g, |parts, acc, off| {
        for &(o, v) in parts {
            accumulate(acc, off, v, o, Clone::clone);
        }
        true
    })
    .expect("uniform pass never aborts")
}

/// `None` once some denominator exceeds `max_bits`.
fn random_exact_dp(g: &StateGraph, max_bits: u64) -> Option<(u64, Vec<BigRational>)> {
    dp::<BigRational>(g, |parts, acc, off| {
        let inv = BigRational::new(BigInt::one(), BigInt::from(parts.len()));
        for &(o, v) in parts {
            accumulate(acc, off, v, o, |w| w * &inv);
        }
        acc.iter().all(|p| p.denom().bits() <= max_bits)
    })
}

fn random_float_dp(g: &StateGraph) -> (u64, Vec<f64>) {
    dp::<f64>(g, |parts, acc, off| {
        let inv = 1.0 / parts.len() as f64;
        for &(o, v) in parts {
            accumulate(acc, off, v, o, |w| w * inv);
        }
        true
    })
    .expect("double pass never aborts")
}

/// Exact length distribution over the given state graph.
pub fn length_distribution_on(
    g: &StateGraph,
    measure: MeasureKind,
    limits: &Limits,
) -> Result<LengthDistribution> {
    let n = g.n();
    Ok(match measure {
        MeasureKind::Uniform => {
            let (off, v) = uniform_dp(g);
            LengthDistribution::new(n, measure, off, Weights::Counts(v))
        }
        MeasureKind::RandomPlay => match random_exact_dp(g, limits.denominator_bits) {
            Some((off, v)) => LengthDistribution::new(n, measure, off, Weights::Exact(v)),
            None => {
                let (off, v) = random_float_dp(g);
                LengthDistribution::new(n, measure, off, Weights::Approx(v))
            }
        },
    })
}

/// Exact distribution of the game length on `n` under `measure`.
pub fn length_distribution(n: u64, measure: MeasureKind, limits: &Limits) -> Result<LengthDistribution> {
    let g = StateGraph::build(n, limits.state_budget)?;
    length_distribution_on(&g, measure, limits)
}

/// Residue probabilities `P(length = z mod modulus)`.
pub fn mod_z_distribution(n: u64, measure: MeasureKind, modulus: u64, limits: &Limits) -> Result<Residues> {
    if modulus == 0 {
        return Err(Error::InvalidArgument("modulus must be at least 1".into()));
    }
    length_distribution(n, measure, limits)?.residues(modulus)
}

fn or_shifted(dst: &mut Vec<u64>, src: &[u64]) {
    // dst |= src << 1
    let need = src.len() + 1;
    if dst.len() < need {
        dst.resize(need, 0);
    }
    let mut carry = 0u64;
    for (i, &w) in src.iter().enumerate() {
        dst[i] |= (w << 1) | carry;
        carry = w >> 63;
    }
    dst[src.len()] |= carry;
}

/// Every length realised by some complete game on `n`.
pub fn achievable_length_set(n: u64, limits: &Limits) -> Result<BTreeSet<u64>> {
    let g = StateGraph::build(n, limits.state_budget)?;
    let mut sets: Vec<Vec<u64>> = vec![Vec::new(); g.len()];
    for &id in g.post_order() {
        let kids = g.children(id);
        let mut acc = Vec::new();
        if kids.is_empty() {
            acc.push(1);
        }
        for &(_, c) in kids {
            or_shifted(&mut acc, &sets[c as usize]);
        }
        sets[id as usize] = acc;
    }
    let root = &sets[g.root() as usize];
    Ok((0..root.len() * 64)
        .filter(|&i| root[i / 64] >> (i % 64) & 1 == 1)
        .map(|i| i as u64)
        .collect())
}

/// Probability of a single complete game under `measure`; `total_games` is
/// `|Omega_N|` and is only read for the uniform measure.
pub fn game_probability(game: &Game, measure: MeasureKind, total_games: &BigUint) -> BigRational {
    match measure {
        MeasureKind::Uniform => big_ratio(&BigUint::one(), total_games),
        MeasureKind::RandomPlay => {
            let mut s = GameState::initial(game.n()).expect("validated game");
            let mut den = BigUint::one();
            for &m in game.moves() {
                den *= s.legal_move_count();
                s.apply_unchecked(m);
            }
            big_ratio(&BigUint::one(), &den)
        }
    }
}

/// Number of combine-only complete games, with the Catalan product bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShortestCount {
    #[serde(serialize_with = "ser_display")]
    pub count: BigUint,
    #[serde(serialize_with = "ser_display")]
    pub catalan_bound: BigUint,
}

fn ser_display<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Counts the shortest games on `n` and evaluates `prod_{k=1}^{n-2} Cat(F_k)`.
pub fn shortest_game_count(n: u64, limits: &Limits) -> Result<ShortestCount> {
    let g = StateGraph::build_with(n, limits.state_budget, |m| m.is_combine())?;
    let count = g.game_counts()[g.root() as usize].clone();
    let bins = fib_index(n)?;
    let catalan_bound = (1..bins.saturating_sub(1))
        .map(|k| catalan(fib_u64(k).expect("index within table")))
        .product();
    Ok(ShortestCount {
        count,
        catalan_bound,
    })
}
