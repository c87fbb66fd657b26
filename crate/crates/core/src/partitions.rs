//! Partitions of the game set into classes of games that differ only in how
//! some combines `C_k` are expanded into equivalent split-and-combine runs.
//!
//! Three schemes are supported:
//!
//! * `BasicPrefix`: the pair `(S_k, C_{k-1})` may stand in for `C_k` when the
//!   move before it is not `S_{k+1}`. Classes have size `2^m`.
//! * `Prefix`: `C_k` may be replaced by `S_k, S_{k-1}, ..., S_{k-l+1}, C_{k-l}`
//!   for any playable `l`.
//! * `Suffix`: `C_k` may be replaced by `C_{k-l}, S_{k-l+1}, ..., S_k`.
//!
//! Each class is identified by its fully compressed game. The representative
//! is the compressed game for `BasicPrefix` and the maximal expansion for the
//! other two schemes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::analysis::{
    enumerate_games, game_probability, ratio_f64, sample_games, LengthDistribution, Limits,
    MeasureKind, SampleConfig, StateGraph, Weights,
};
use crate::engine::{Game, GameState, Move, MoveKind};
use crate::error::{Error, Result};
use crate::stats::{ks_to_normal, summarize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    BasicPrefix,
    Prefix,
    Suffix,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::BasicPrefix, SchemeKind::Prefix, SchemeKind::Suffix];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::BasicPrefix => "basic",
            SchemeKind::Prefix => "prefix",
            SchemeKind::Suffix => "suffix",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" | "basic-prefix" => Ok(SchemeKind::BasicPrefix),
            "prefix" => Ok(SchemeKind::Prefix),
            "suffix" => Ok(SchemeKind::Suffix),
            _ => Err(Error::Parse(format!("unknown scheme {s:?}"))),
        }
    }
}

impl Serialize for SchemeKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// The run of moves that replaces `C_k` with expansion length `l`.
pub fn expansion(scheme: SchemeKind, k: u32, l: u32) -> Vec<Move> {
    debug_assert!(l < k);
    match scheme {
        SchemeKind::BasicPrefix | SchemeKind::Prefix => {
            let mut v: Vec<Move> = (0..l).map(|j| Move::split(k - j)).collect();
            v.push(Move::combine(k - l));
            v
        }
        SchemeKind::Suffix => {
            let mut v = vec![Move::combine(k - l)];
            v.extend((k - l + 1..=k).map(Move::split));
            v
        }
    }
}

/// A compressed game: each move carries how many merges produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Compressed {
    moves: Vec<Move>,
    merged: Vec<u32>,
}

fn compress_basic(moves: &[Move]) -> Compressed {
    let mut mv = moves.to_vec();
    let mut merged = vec![0u32; mv.len()];
    'scan: loop {
        for i in 0..mv.len().saturating_sub(1) {
            let (a, b) = (mv[i], mv[i + 1]);
            if a.kind == MoveKind::Split && b.kind == MoveKind::Combine && b.index + 1 == a.index {
                let k = a.index;
                if i > 0 && mv[i - 1] == Move::split(k + 1) {
                    continue;
                }
                mv.splice(i..i + 2, [Move::combine(k)]);
                merged.splice(i..i + 2, [1]);
                continue 'scan;
            }
        }
        break;
    }
    Compressed { moves: mv, merged }
}

fn compress_prefix(moves: &[Move]) -> Compressed {
    let mut out: Vec<(Move, u32)> = Vec::with_capacity(moves.len());
    for &m in moves {
        let mut cur = (m, 0);
        // fold (S_{j+1}, C_j) into C_{j+1} as long as the stack allows
        while cur.0.kind == MoveKind::Combine {
            match out.last() {
                Some(&(top, _)) if top == Move::split(cur.0.index + 1) => {
                    out.pop();
                    cur = (Move::combine(cur.0.index + 1), cur.1 + 1);
                }
                _ => break,
            }
        }
        out.push(cur);
    }
    let (moves, merged) = out.into_iter().unzip();
    Compressed { moves, merged }
}

fn compress_suffix(moves: &[Move]) -> Compressed {
    let mut out: Vec<(Move, u32)> = Vec::with_capacity(moves.len());
    for &m in moves {
        match out.last() {
            Some(&(top, t)) if m.kind == MoveKind::Split && top == Move::combine(m.index - 1) => {
                out.pop();
                out.push((Move::combine(m.index), t + 1));
            }
            _ => out.push((m, 0)),
        }
    }
    let (moves, merged) = out.into_iter().unzip();
    Compressed { moves, merged }
}

fn compress(moves: &[Move], scheme: SchemeKind) -> Compressed {
    match scheme {
        SchemeKind::BasicPrefix => compress_basic(moves),
        SchemeKind::Prefix => compress_prefix(moves),
        SchemeKind::Suffix => compress_suffix(moves),
    }
}

/// Fully compressed form of `g`, which identifies its class.
pub fn compressed_game(g: &Game, scheme: SchemeKind) -> Game {
    Game::from_trusted(g.n(), compress(g.moves(), scheme).moves)
}

/// One replaceable combine of a compressed game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delimiter {
    /// 0-based position in the compressed game.
    pub position: usize,
    pub k: u32,
    /// Longest admissible expansion.
    pub max_len: u32,
    /// Legal moves right after the first move of the length-1 expansion.
    pub branch_count: Option<u64>,
    /// Random-play weight of each expansion length, relative to length 0.
    #[serde(skip)]
    pub weights: Vec<BigRational>,
}

fn delimiters(n: u64, compressed: &[Move], scheme: SchemeKind) -> Vec<Delimiter> {
    let mut s = GameState::initial(n).expect("validated game");
    let mut out = Vec::new();
    for (i, &m) in compressed.iter().enumerate() {
        if m.kind == MoveKind::Combine && m.index >= 2 {
            let k = m.index;
            let eligible = match scheme {
                SchemeKind::BasicPrefix => {
                    let prev_ok = i == 0 || compressed[i - 1] != Move::split(k + 1);
                    prev_ok && s.height(k as usize) >= 2
                }
                _ => true,
            };
            if eligible {
                let cap = if scheme == SchemeKind::BasicPrefix { 1 } else { k - 1 };
                let mut weights = vec![BigRational::one()];
                let mut branch_count = None;
                for l in 1..=cap {
                    let run = expansion(scheme, k, l);
                    let mut t = s.clone();
                    let mut w = BigRational::one();
                    let mut ok = true;
                    for (j, &mv) in run.iter().enumerate() {
                        if !t.is_legal(mv) {
                            ok = false;
                            break;
                        }
                        t.apply_unchecked(mv);
                        if j + 1 < run.len() {
                            let deg = t.legal_move_count() as u64;
                            if l == 1 && j == 0 {
                                branch_count = Some(deg);
                            }
                            w /= BigRational::from(BigInt::from(deg));
                        }
                    }
                    if !ok {
                        break;
                    }
                    weights.push(w);
                }
                out.push(Delimiter {
                    position: i,
                    k,
                    max_len: weights.len() as u32 - 1,
                    branch_count,
                    weights,
                });
            }
        }
        s.apply_unchecked(m);
    }
    out
}

/// Entry of a base sequence: a fixed move, or a replaceable combine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseEntry {
    Move(Move),
    Delimiter { k: u32, max_len: u32 },
}

impl fmt::Display for BaseEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseEntry::Move(m) => write!(f, "{m}"),
            BaseEntry::Delimiter { k, max_len } => write!(f, "E{k}^{max_len}"),
        }
    }
}

impl Serialize for BaseEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseSequence {
    pub entries: Vec<BaseEntry>,
}

impl fmt::Display for BaseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn base_sequence(compressed: &[Move], dels: &[Delimiter]) -> BaseSequence {
    let mut entries: Vec<BaseEntry> = compressed.iter().map(|&m| BaseEntry::Move(m)).collect();
    for d in dels {
        entries[d.position] = BaseEntry::Delimiter {
            k: d.k,
            max_len: d.max_len,
        };
    }
    BaseSequence { entries }
}

fn expand(compressed: &[Move], dels: &[Delimiter], scheme: SchemeKind, choice: impl Fn(usize) -> u32) -> Vec<Move> {
    let mut out = Vec::with_capacity(compressed.len());
    let mut di = 0;
    for (i, &m) in compressed.iter().enumerate() {
        if di < dels.len() && dels[di].position == i {
            out.extend(expansion(scheme, dels[di].k, choice(di)));
            di += 1;
        } else {
            out.push(m);
        }
    }
    out
}

/// Representative of the class of `g`, and the base sequence of the class.
pub fn representative(g: &Game, scheme: SchemeKind) -> (Game, BaseSequence) {
    let c = compress(g.moves(), scheme);
    let dels = delimiters(g.n(), &c.moves, scheme);
    let base = base_sequence(&c.moves, &dels);
    let rep = match scheme {
        SchemeKind::BasicPrefix => c.moves,
        _ => expand(&c.moves, &dels, scheme, |i| dels[i].max_len),
    };
    (Game::from_trusted(g.n(), rep), base)
}

pub fn is_representative(g: &Game, scheme: SchemeKind) -> bool {
    representative(g, scheme).0 == *g
}

/// Everything about one class that follows from its representative.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub representative: Game,
    pub scheme: SchemeKind,
    pub measure: MeasureKind,
    pub base: BaseSequence,
    pub delimiters: Vec<Delimiter>,
    /// Number of delimiters with a real choice.
    pub m: u64,
    pub class_size: BigUint,
    /// `P(expanded)` for each delimiter with a choice, under `measure`.
    pub bernoulli_params: Vec<BigRational>,
    /// Branch counts `n_i` matching `bernoulli_params` (basic scheme).
    pub branch_counts: Vec<u64>,
    pub conditional_dist: LengthDistribution,
    pub class_prob: BigRational,
}

impl ClassSummary {
    /// KS distance of the normalised conditional length law to the normal.
    pub fn ks(&self) -> Result<f64> {
        summarize(&self.conditional_dist)
            .ks_to_normal
            .ok_or(Error::ZeroVariance)
    }
}

/// Choice law of one delimiter under `measure`, normalised.
fn choice_law(d: &Delimiter, measure: MeasureKind) -> Vec<BigRational> {
    let w: Vec<BigRational> = match measure {
        MeasureKind::Uniform => vec![BigRational::one(); d.weights.len()],
        MeasureKind::RandomPlay => d.weights.clone(),
    };
    let total: BigRational = w.iter().sum();
    w.into_iter().map(|x| x / &total).collect()
}

fn convolve(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn summary_from(
    n: u64,
    c: &Compressed,
    scheme: SchemeKind,
    measure: MeasureKind,
    total_games: Option<&BigUint>,
) -> Result<ClassSummary> {
    let dels = delimiters(n, &c.moves, scheme);
    let base = base_sequence(&c.moves, &dels);
    let rep = match scheme {
        SchemeKind::BasicPrefix => c.moves.clone(),
        _ => expand(&c.moves, &dels, scheme, |i| dels[i].max_len),
    };
    let free: Vec<&Delimiter> = dels.iter().filter(|d| d.max_len >= 1).collect();
    let class_size: BigUint = dels.iter().map(|d| BigUint::from(d.max_len + 1)).product();
    let mut law = vec![BigRational::one()];
    let mut bernoulli_params = Vec::new();
    let mut branch_counts = Vec::new();
    for d in &free {
        let cl = choice_law(d, measure);
        bernoulli_params.push(BigRational::one() - &cl[0]);
        if let Some(b) = d.branch_count {
            branch_counts.push(b);
        }
        law = convolve(&law, &cl);
    }
    let conditional_dist = LengthDistribution::new(n, measure, c.moves.len() as u64, Weights::Exact(law));
    let compressed_game = Game::from_trusted(n, c.moves.clone());
    let class_prob = match measure {
        MeasureKind::Uniform => {
            let total = match total_games {
                Some(t) => t.clone(),
                None => StateGraph::build(n, Limits::from_env().state_budget)?.game_counts()[0].clone(),
            };
            BigRational::new(BigInt::from(class_size.clone()), BigInt::from(total))
        }
        MeasureKind::RandomPlay => {
            let base_p = game_probability(&compressed_game, measure, &BigUint::one());
            dels.iter()
                .fold(base_p, |acc, d| acc * d.weights.iter().sum::<BigRational>())
        }
    };
    Ok(ClassSummary {
        representative: Game::from_trusted(n, rep),
        scheme,
        measure,
        base,
        m: free.len() as u64,
        delimiters: dels,
        class_size,
        bernoulli_params,
        branch_counts,
        conditional_dist,
        class_prob,
    })
}

/// Summary of the class whose representative is `rep`.
pub fn class_summary(rep: &Game, scheme: SchemeKind, measure: MeasureKind) -> Result<ClassSummary> {
    if !is_representative(rep, scheme) {
        return Err(Error::NotARepresentative);
    }
    summary_from(rep.n(), &compress(rep.moves(), scheme), scheme, measure, None)
}

fn class_summary_with_total(
    rep: &Game,
    scheme: SchemeKind,
    measure: MeasureKind,
    total: &BigUint,
) -> Result<ClassSummary> {
    summary_from(rep.n(), &compress(rep.moves(), scheme), scheme, measure, Some(total))
}

/// Outcome of checking that a scheme partitions the game set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    pub n: u64,
    pub scheme: SchemeKind,
    pub games: u64,
    pub classes: u64,
    /// Class sizes keyed by representative, sorted by representative text.
    pub class_sizes: BTreeMap<String, u64>,
    pub passed: bool,
    /// First failed check, naming the offending game.
    pub violation: Option<String>,
}

struct ClassAcc {
    rep: Game,
    compressed: Compressed,
    games: Vec<(Game, Vec<u32>)>,
}

fn choices_of(c: &Compressed, dels: &[Delimiter]) -> Vec<u32> {
    dels.iter().map(|d| c.merged[d.position]).collect()
}

/// Enumerates every game on `n` and checks that the classes are disjoint,
/// cover all games, have the predicted sizes, and that class probabilities
/// and conditional laws match direct game probabilities exactly under both
/// measures.
pub fn partition_check(n: u64, scheme: SchemeKind, limits: &Limits) -> Result<PartitionReport> {
    let mut classes: HashMap<Vec<Move>, ClassAcc> = HashMap::new();
    let mut games = 0u64;
    let mut violation: Option<String> = None;
    let flag = |v: &mut Option<String>, msg: String| {
        if v.is_none() {
            *v = Some(msg);
        }
    };
    for g in enumerate_games(n, limits.enumeration_cap)? {
        games += 1;
        let c = compress(g.moves(), scheme);
        let (rep, _) = representative(&g, scheme);
        if representative(&rep, scheme).0 != rep {
            flag(&mut violation, format!("representative of {g} is not idempotent"));
        }
        if compress(rep.moves(), scheme).moves != c.moves {
            flag(&mut violation, format!("representative of {g} lies in another class"));
        }
        let dels = delimiters(n, &c.moves, scheme);
        let choice = choices_of(&c, &dels);
        let stray = c
            .merged
            .iter()
            .enumerate()
            .any(|(i, &t)| t > 0 && !dels.iter().any(|d| d.position == i));
        if stray || choice.iter().zip(&dels).any(|(&l, d)| l > d.max_len) {
            flag(&mut violation, format!("{g} uses an expansion outside its base sequence"));
        }
        let acc = classes.entry(c.moves.clone()).or_insert_with(|| ClassAcc {
            rep: rep.clone(),
            compressed: c.clone(),
            games: Vec::new(),
        });
        acc.games.push((g, choice));
    }

    let total = BigUint::from(games);
    let mut sum_prob = [BigRational::zero(), BigRational::zero()];
    let mut class_sizes = BTreeMap::new();
    for acc in classes.values() {
        class_sizes.insert(acc.rep.to_string(), acc.games.len() as u64);
        for (mi, measure) in MeasureKind::ALL.into_iter().enumerate() {
            let s = summary_from(n, &acc.compressed, scheme, measure, Some(&total))?;
            if s.class_size != BigUint::from(acc.games.len()) {
                flag(
                    &mut violation,
                    format!("class of {} has {} games, predicted {}", acc.rep, acc.games.len(), s.class_size),
                );
            }
            if scheme == SchemeKind::BasicPrefix && s.class_size != BigUint::one() << s.m {
                flag(&mut violation, format!("class of {} is not of size 2^m", acc.rep));
            }
            let laws: Vec<Vec<BigRational>> = s.delimiters.iter().map(|d| choice_law(d, measure)).collect();
            let mut direct_sum = BigRational::zero();
            for (g, choice) in &acc.games {
                let p = game_probability(g, measure, &total);
                let predicted: BigRational = laws
                    .iter()
                    .zip(choice)
                    .fold(s.class_prob.clone(), |a, (law, &l)| a * &law[l as usize]);
                if p != predicted {
                    flag(
                        &mut violation,
                        format!("{g}: probability {p} under {measure} does not factor as predicted {predicted}"),
                    );
                }
                direct_sum += p;
            }
            if direct_sum != s.class_prob {
                flag(&mut violation, format!("class of {} has probability {direct_sum}, predicted {}", acc.rep, s.class_prob));
            }
            sum_prob[mi] += &s.class_prob;
        }
    }
    for (mi, measure) in MeasureKind::ALL.into_iter().enumerate() {
        if !sum_prob[mi].is_one() {
            flag(&mut violation, format!("class probabilities sum to {} under {measure}", sum_prob[mi]));
        }
    }
    let covered: u64 = class_sizes.values().sum();
    if covered != games {
        flag(&mut violation, format!("classes cover {covered} of {games} games"));
    }
    Ok(PartitionReport {
        n,
        scheme,
        games,
        classes: classes.len() as u64,
        class_sizes,
        passed: violation.is_none(),
        violation,
    })
}

/// Summaries of every class, in the order their first game is enumerated.
pub fn all_classes(n: u64, scheme: SchemeKind, measure: MeasureKind, limits: &Limits) -> Result<Vec<ClassSummary>> {
    let mut seen: HashMap<Vec<Move>, ()> = HashMap::new();
    let mut reps = Vec::new();
    let mut games = 0u64;
    for g in enumerate_games(n, limits.enumeration_cap)? {
        games += 1;
        let c = compress(g.moves(), scheme);
        if seen.insert(c.moves, ()).is_none() {
            reps.push(representative(&g, scheme).0);
        }
    }
    let total = BigUint::from(games);
    reps.iter()
        .map(|r| class_summary_with_total(r, scheme, measure, &total))
        .collect()
}

/// Summaries of the distinct classes met by `cfg.count` sampled games.
pub fn sampled_classes(n: u64, scheme: SchemeKind, cfg: &SampleConfig, limits: &Limits) -> Result<Vec<ClassSummary>> {
    let mut seen: HashMap<Vec<Move>, ()> = HashMap::new();
    let mut out = Vec::new();
    for g in sample_games(n, cfg, limits)? {
        let c = compress(g.moves(), scheme);
        if seen.insert(c.moves.clone(), ()).is_none() {
            out.push(summary_from(n, &c, scheme, cfg.measure, None)?);
        }
    }
    Ok(out)
}

/// Distribution of the number of free choices `m` of the class containing a
/// game, and related class statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MStatistics {
    pub n: u64,
    pub scheme: SchemeKind,
    pub measure: MeasureKind,
    /// `m -> probability`.
    pub m_distribution: BTreeMap<u64, f64>,
    pub median_m: u64,
    pub max_class_prob: f64,
    pub classes: u64,
    /// `w -> probability`, where `w` counts occurrences of `C1, C1, C2`.
    pub witness_distribution: BTreeMap<u64, f64>,
    /// Whether `w <= m` held for every game examined.
    pub witness_bounded: bool,
}

fn witness_count(moves: &[Move]) -> u64 {
    let pat = [Move::combine(1), Move::combine(1), Move::combine(2)];
    moves.windows(3).filter(|w| *w == pat).count() as u64
}

fn median(dist: &BTreeMap<u64, f64>) -> u64 {
    let mut acc = 0.0;
    for (&m, &p) in dist {
        acc += p;
        if acc >= 0.5 - 1e-12 {
            return m;
        }
    }
    dist.keys().last().copied().unwrap_or(0)
}

/// Exact `m` statistics over every game on `n`.
pub fn m_statistics(n: u64, scheme: SchemeKind, measure: MeasureKind, limits: &Limits) -> Result<MStatistics> {
    let games: Vec<Game> = enumerate_games(n, limits.enumeration_cap)?.collect();
    let total = BigUint::from(games.len());
    let mut m_dist: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut w_dist: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut class_p: HashMap<Vec<Move>, BigRational> = HashMap::new();
    let mut m_of: HashMap<Vec<Move>, u64> = HashMap::new();
    let mut witness_bounded = true;
    for g in &games {
        let c = compress(g.moves(), scheme);
        let m = *m_of
            .entry(c.moves.clone())
            .or_insert_with(|| delimiters(n, &c.moves, scheme).iter().filter(|d| d.max_len >= 1).count() as u64);
        let p = game_probability(g, measure, &total);
        let w = witness_count(g.moves());
        witness_bounded &= w <= m;
        *m_dist.entry(m).or_insert_with(BigRational::zero) += &p;
        *w_dist.entry(w).or_insert_with(BigRational::zero) += &p;
        *class_p.entry(c.moves).or_insert_with(BigRational::zero) += p;
    }
    let m_distribution: BTreeMap<u64, f64> = m_dist.iter().map(|(&k, v)| (k, ratio_f64(v))).collect();
    Ok(MStatistics {
        n,
        scheme,
        measure,
        median_m: median(&m_distribution),
        m_distribution,
        max_class_prob: class_p.values().map(ratio_f64).fold(0.0, f64::max),
        classes: class_p.len() as u64,
        witness_distribution: w_dist.iter().map(|(&k, v)| (k, ratio_f64(v))).collect(),
        witness_bounded,
    })
}

/// `m` statistics estimated from sampled games. The maximum class
/// probability is taken over the classes met.
pub fn m_statistics_sampled(n: u64, scheme: SchemeKind, cfg: &SampleConfig, limits: &Limits) -> Result<MStatistics> {
    let games = sample_games(n, cfg, limits)?;
    let weight = 1.0 / games.len().max(1) as f64;
    let mut m_distribution: BTreeMap<u64, f64> = BTreeMap::new();
    let mut witness_distribution: BTreeMap<u64, f64> = BTreeMap::new();
    let mut summaries: HashMap<Vec<Move>, (u64, f64)> = HashMap::new();
    let mut witness_bounded = true;
    for g in &games {
        let c = compress(g.moves(), scheme);
        let (m, _) = match summaries.get(&c.moves) {
            Some(&v) => v,
            None => {
                let s = summary_from(n, &c, scheme, cfg.measure, None)?;
                let v = (s.m, ratio_f64(&s.class_prob));
                summaries.insert(c.moves.clone(), v);
                v
            }
        };
        let w = witness_count(g.moves());
        witness_bounded &= w <= m;
        *m_distribution.entry(m).or_default() += weight;
        *witness_distribution.entry(w).or_default() += weight;
    }
    Ok(MStatistics {
        n,
        scheme,
        measure: cfg.measure,
        median_m: median(&m_distribution),
        m_distribution,
        max_class_prob: summaries.values().map(|v| v.1).fold(0.0, f64::max),
        classes: summaries.len() as u64,
        witness_distribution,
        witness_bounded,
    })
}

/// KS distance of one class's normalised conditional length law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassKs {
    pub representative: Game,
    pub m: u64,
    /// `None` when the class was excluded for zero variance.
    pub ks: Option<f64>,
}

/// Per-class KS distances for the classes with at least `min_m` choices.
pub fn class_ks(classes: &[ClassSummary], min_m: u64) -> Vec<ClassKs> {
    classes
        .iter()
        .filter(|c| c.m >= min_m)
        .map(|c| ClassKs {
            representative: c.representative.clone(),
            m: c.m,
            ks: c.ks().ok(),
        })
        .collect()
}

/// KS distance of the sum of independent delimiters with the given
/// expansion probabilities (each adds 0 or 1 to the length).
pub fn synthetic_ks(params: &[BigRational]) -> Result<f64> {
    let mut law = vec![BigRational::one()];
    for p in params {
        law = convolve(&law, &[BigRational::one() - p, p.clone()]);
    }
    let atoms: Vec<(f64, f64)> = law.iter().enumerate().map(|(i, p)| (i as f64, ratio_f64(p))).collect();
    ks_to_normal(&atoms)
}
