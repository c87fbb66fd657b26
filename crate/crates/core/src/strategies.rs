//! Deterministic game constructors: shortest, longest, Type-A-only, add-one
//! tails, the closed-form length bound, and a game of any achievable length.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::engine::{replay_counts, Game, GameState, Move};
use crate::error::{Error, Result};
use crate::numerics::{fib_index, fib_u64, floor_phi_times, is_fib_minus_one, zeckendorf};

/// Combine counts `MC_1..MC_{n-1}` forced on every combine-only path to a
/// target board.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombineMultiset {
    /// `mc[i]` is `MC_{i+1}`.
    mc: Vec<u64>,
}

impl CombineMultiset {
    pub fn mc(&self, k: usize) -> u64 {
        if k == 0 {
            return 0;
        }
        self.mc.get(k - 1).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.mc
    }

    pub fn total(&self) -> u64 {
        self.mc.iter().sum()
    }
}

/// `[N - Z(N), longest length]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LengthInterval {
    pub lo: u64,
    pub hi: u64,
}

impl LengthInterval {
    pub fn contains(&self, m: u64) -> bool {
        self.lo <= m && m <= self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Order in which simultaneously available Type A moves are played by
/// [`longest_game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeAOrder {
    /// `C_1, S_2, S_3, ...`
    LowestFirst,
    /// `S_{n-1}, ..., S_2, C_1`
    #[default]
    HighestFirst,
    /// `S_2, ..., S_{n-1}, C_1`
    C1Last,
    /// `C_1, S_{n-1}, ..., S_2`
    C1First,
}

impl TypeAOrder {
    pub const ALL: [TypeAOrder; 4] = [
        TypeAOrder::LowestFirst,
        TypeAOrder::HighestFirst,
        TypeAOrder::C1Last,
        TypeAOrder::C1First,
    ];
}

impl std::str::FromStr for TypeAOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-first" => Ok(TypeAOrder::LowestFirst),
            "highest-first" => Ok(TypeAOrder::HighestFirst),
            "c1-last" => Ok(TypeAOrder::C1Last),
            "c1-first" => Ok(TypeAOrder::C1First),
            _ => Err(Error::Parse(format!("unknown Type A order {s:?}"))),
        }
    }
}

/// Pads `target` to the board of `n` and checks that it is a multiset of
/// Fibonacci tokens with total value `n`.
fn target_state(n: u64, target: &[u64]) -> Result<GameState> {
    GameState::from_heights(n, target)
}

/// Solves the triangular system relating a target board to the number of
/// combines of each index in any combine-only game reaching it.
pub fn combine_multiset(n: u64, target: &[u64]) -> Result<CombineMultiset> {
    let t = target_state(n, target)?;
    let bins = t.bins();
    if bins < 2 {
        return Ok(CombineMultiset { mc: Vec::new() });
    }
    // mc[k] holds MC_k for k in 1..bins, with MC_bins = MC_{bins+1} = 0
    let mut mc = vec![0i128; bins + 2];
    for k in (2..=bins).rev() {
        mc[k - 1] = i128::from(t.height(k)) + mc[k] + mc[k + 1];
    }
    let bin1 = i128::from(n) - 2 * mc[1] - mc[2];
    if bin1 != i128::from(t.height(1)) {
        return Err(Error::InvalidTarget(format!(
            "bin 1 balance gives {bin1}, target has {}",
            t.height(1)
        )));
    }
    let mc = mc[1..bins]
        .iter()
        .map(|&x| u64::try_from(x).map_err(|_| Error::InvalidTarget("negative combine count".into())))
        .collect::<Result<Vec<u64>>>()?;
    Ok(CombineMultiset { mc })
}

/// A combine-only move sequence from `N` copies of `F_1` to `target`.
///
/// Built by playing backwards from the target: the highest non-`F_1` token
/// is repeatedly expanded into the two tokens that combine to it.
pub fn combine_path(n: u64, target: &[u64]) -> Result<Vec<Move>> {
    let t = target_state(n, target)?;
    let mut h = t.heights().to_vec();
    let mut rev = Vec::with_capacity((n - t.token_count()) as usize);
    let mut top = h.len();
    loop {
        while top > 1 && h[top - 1] == 0 {
            top -= 1;
        }
        if top <= 1 {
            break;
        }
        let k = top;
        h[k - 1] -= 1;
        if k == 2 {
            h[0] += 2;
            rev.push(Move::combine(1));
        } else {
            h[k - 2] += 1;
            h[k - 3] += 1;
            rev.push(Move::combine(k as u32 - 1));
        }
    }
    rev.reverse();
    Ok(rev)
}

/// Shortest game on `n`: the reverse-play combine path to the Zeckendorf
/// decomposition, of length `N - Z(N)`.
pub fn shortest_game(n: u64) -> Result<Game> {
    let z = zeckendorf(n)?;
    let moves = combine_path(n, &z.heights(z.top()))?;
    Ok(Game::from_trusted(n, moves))
}

/// Shortest game to an explicit target, which must be the terminal board.
pub fn shortest_game_to(n: u64, target: &[u64]) -> Result<Game> {
    let t = target_state(n, target)?;
    if !t.is_terminal() {
        return Err(Error::InvalidTarget(
            "target still has legal moves, so no complete game ends there".into(),
        ));
    }
    shortest_game(n)
}

fn pick_type_a(s: &GameState, order: TypeAOrder) -> Option<Move> {
    let h = s.heights();
    let bins = h.len();
    let c1 = (bins >= 2 && h[0] >= 2).then_some(Move::combine(1));
    let mut asc = (2..bins).filter(|&k| h[k - 1] >= 2).map(|k| Move::split(k as u32));
    let mut desc = (2..bins).rev().filter(|&k| h[k - 1] >= 2).map(|k| Move::split(k as u32));
    match order {
        TypeAOrder::LowestFirst => c1.or_else(|| asc.next()),
        TypeAOrder::HighestFirst => desc.next().or(c1),
        TypeAOrder::C1Last => asc.next().or(c1),
        TypeAOrder::C1First => c1.or_else(|| desc.next()),
    }
}

fn lowest_combine(s: &GameState) -> Option<Move> {
    let h = s.heights();
    (2..h.len())
        .find(|&k| h[k - 2] > 0 && h[k - 1] > 0)
        .map(|k| Move::combine(k as u32))
}

/// Plays the longest-game rule from `s` until the board is terminal.
pub fn play_longest_from(s: &GameState, order: TypeAOrder) -> Vec<Move> {
    let mut s = s.clone();
    let mut moves = Vec::new();
    while let Some(m) = pick_type_a(&s, order).or_else(|| lowest_combine(&s)) {
        s.apply_unchecked(m);
        moves.push(m);
    }
    moves
}

/// Longest game: any Type A move when one exists, otherwise the lowest
/// available combine.
pub fn longest_game(n: u64, order: TypeAOrder) -> Result<Game> {
    let s = GameState::initial(n)?;
    Ok(Game::from_trusted(n, play_longest_from(&s, order)))
}

/// `floor(phi^2 N - Z_I(N) - 2 Z(N) + phi - 1)`, evaluated exactly.
pub fn length_upper_bound(n: u64) -> Result<u64> {
    let z = zeckendorf(n)?;
    // phi^2 N + phi - 1 = phi (N + 1) + N - 1
    let f = floor_phi_times(&BigUint::from(n + 1))
        .to_u64()
        .expect("bound fits in u64 for u64 inputs");
    let v = i128::from(f) + i128::from(n) - 1 - i128::from(z.index_sum()) - 2 * i128::from(z.count());
    Ok(v.max(0) as u64)
}

/// The combines taking `Zeck(N-1)` plus one extra `F_1` to `Zeck(N)`.
pub fn add_one_tail(n: u64) -> Result<Vec<Move>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("add-one tail needs N >= 2, got {n}")));
    }
    let z = zeckendorf(n - 1)?;
    let mut h = z.heights(z.top());
    h[0] += 1;
    let mut s = GameState::from_heights(n, &h)?;
    let mut moves = Vec::new();
    loop {
        let legal = s.legal_moves();
        match legal.as_slice() {
            [] => break,
            [m] => {
                debug_assert!(m.is_combine());
                s.apply_unchecked(*m);
                moves.push(*m);
            }
            _ => unreachable!("add-one tail has a unique continuation"),
        }
    }
    Ok(moves)
}

/// A game made only of `C_1` and split moves; exists iff `N = F_k - 1`.
pub fn type_a_game(n: u64) -> Result<Game> {
    if n == 0 {
        return Err(Error::NonPositiveInput(0));
    }
    if !is_fib_minus_one(n) {
        return Err(Error::NotTypeAExpressible(n));
    }
    for order in TypeAOrder::ALL {
        let g = longest_game(n, order)?;
        if g.moves().iter().all(Move::is_type_a) {
            return Ok(g);
        }
    }
    // depth-first over Type A moves only, remembering dead boards
    fn dfs(s: &mut GameState, path: &mut Vec<Move>, dead: &mut HashSet<Vec<u64>>) -> bool {
        let legal = s.legal_moves();
        if legal.is_empty() {
            return true;
        }
        if dead.contains(s.heights()) {
            return false;
        }
        for m in legal.into_iter().filter(Move::is_type_a) {
            let saved = s.clone();
            s.apply_unchecked(m);
            path.push(m);
            if dfs(s, path, dead) {
                return true;
            }
            path.pop();
            *s = saved;
        }
        dead.insert(s.heights().to_vec());
        false
    }
    let mut s = GameState::initial(n)?;
    let mut path = Vec::new();
    if dfs(&mut s, &mut path, &mut HashSet::new()) {
        Ok(Game::from_trusted(n, path))
    } else {
        Err(Error::NotTypeAExpressible(n))
    }
}

/// `[N - Z(N), length of the longest game]`.
pub fn achievable_interval(n: u64) -> Result<LengthInterval> {
    let z = zeckendorf(n)?;
    let hi = longest_game(n, TypeAOrder::default())?.len() as u64;
    Ok(LengthInterval { lo: n - z.count(), hi })
}

/// Largest input solved by exhaustive search in [`game_of_length`].
pub const BASE_CASE_MAX: u64 = 12;

/// Node budget for the backtracking fallback of [`game_of_length`].
pub const SEARCH_NODE_BUDGET: usize = 1_000_000;

type MaskMemo = HashMap<Vec<u64>, u128>;

fn length_mask(s: &GameState, memo: &mut MaskMemo) -> u128 {
    if let Some(&m) = memo.get(s.heights()) {
        return m;
    }
    let legal = s.legal_moves();
    let mask = if legal.is_empty() {
        1
    } else {
        legal.into_iter().fold(0u128, |acc, m| {
            let mut c = s.clone();
            c.apply_unchecked(m);
            acc | (length_mask(&c, memo) << 1)
        })
    };
    memo.insert(s.heights().to_vec(), mask);
    mask
}

fn base_cache() -> &'static [MaskMemo] {
    static CACHE: OnceLock<Vec<MaskMemo>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (0..=BASE_CASE_MAX)
            .map(|n| {
                let mut memo = MaskMemo::new();
                if n > 0 {
                    length_mask(&GameState::initial(n).expect("n >= 1"), &mut memo);
                }
                memo
            })
            .collect()
    })
}

/// Set of achievable lengths for `n <= BASE_CASE_MAX`, as a bitmask.
pub fn base_case_lengths(n: u64) -> Option<u128> {
    if n == 0 || n > BASE_CASE_MAX {
        return None;
    }
    let s = GameState::initial(n).ok()?;
    base_cache()[n as usize].get(s.heights()).copied()
}

fn base_case_walk(n: u64, m: u64) -> Option<Vec<Move>> {
    let memo = &base_cache()[n as usize];
    let mut s = GameState::initial(n).ok()?;
    if memo.get(s.heights())? >> m & 1 == 0 {
        return None;
    }
    let mut moves = Vec::with_capacity(m as usize);
    for left in (1..=m).rev() {
        let next = s.legal_moves().into_iter().find(|&mv| {
            let mut c = s.clone();
            c.apply_unchecked(mv);
            memo.get(c.heights()).is_some_and(|&mask| mask >> (left - 1) & 1 == 1)
        })?;
        s.apply_unchecked(next);
        moves.push(next);
    }
    Some(moves)
}

/// Greedy longest continuation once a game on `F_n - 1` has finished inside
/// the board of `n`.
fn continuation(base: u64, n: u64) -> Result<Vec<Move>> {
    let z = zeckendorf(base)?;
    let mut h = z.heights(z.top());
    h[0] += n - base;
    let s = GameState::from_heights(n, &h)?;
    Ok(play_longest_from(&s, TypeAOrder::HighestFirst))
}

struct Builder {
    intervals: HashMap<u64, LengthInterval>,
    failed: HashSet<(u64, u64)>,
}

impl Builder {
    fn interval(&mut self, n: u64) -> Result<LengthInterval> {
        if let Some(&iv) = self.intervals.get(&n) {
            return Ok(iv);
        }
        let iv = achievable_interval(n)?;
        self.intervals.insert(n, iv);
        Ok(iv)
    }

    fn build(&mut self, n: u64, m: u64) -> Result<Option<Vec<Move>>> {
        if n <= BASE_CASE_MAX {
            return Ok(base_case_walk(n, m));
        }
        if self.failed.contains(&(n, m)) {
            return Ok(None);
        }
        // extend a game on N - 1 by the add-one tail
        let tail = add_one_tail(n)?;
        let t = tail.len() as u64;
        let prev = self.interval(n - 1)?;
        if m >= t && prev.contains(m - t) {
            if let Some(mut moves) = self.build(n - 1, m - t)? {
                moves.extend(tail);
                return Ok(Some(moves));
            }
        }
        // play a game on F_n - 1, then continue greedily with the extra tokens
        let base = fib_u64(fib_index(n)?).expect("index within table") - 1;
        if base >= 1 && base < n {
            let cont = continuation(base, n)?;
            let c = cont.len() as u64;
            let biv = self.interval(base)?;
            if m >= c && biv.contains(m - c) {
                if let Some(mut moves) = self.build(base, m - c)? {
                    moves.extend(cont);
                    return Ok(Some(moves));
                }
            }
        }
        self.failed.insert((n, m));
        Ok(None)
    }
}

/// Depth-first search for a game of length exactly `m`, pruning boards that
/// already failed for the same remaining length.
fn search_length(n: u64, m: u64, budget: usize) -> Result<Option<Vec<Move>>> {
    let z_count = zeckendorf(n)?.count();
    let mut dead: HashSet<(Vec<u64>, u64)> = HashSet::new();
    let mut nodes = 0usize;

    fn go(
        s: &GameState,
        left: u64,
        z_count: u64,
        path: &mut Vec<Move>,
        dead: &mut HashSet<(Vec<u64>, u64)>,
        nodes: &mut usize,
        budget: usize,
    ) -> Option<bool> {
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let legal = s.legal_moves();
        if legal.is_empty() {
            return Some(left == 0);
        }
        // every remaining combine costs one move
        if left == 0 || left < s.token_count() - z_count {
            return Some(false);
        }
        let key = (s.heights().to_vec(), left);
        if dead.contains(&key) {
            return Some(false);
        }
        for mv in legal {
            let mut c = s.clone();
            c.apply_unchecked(mv);
            path.push(mv);
            if go(&c, left - 1, z_count, path, dead, nodes, budget)? {
                return Some(true);
            }
            path.pop();
        }
        dead.insert(key);
        Some(false)
    }

    let s = GameState::initial(n)?;
    let mut path = Vec::new();
    Ok(match go(&s, m, z_count, &mut path, &mut dead, &mut nodes, budget) {
        Some(true) => Some(path),
        _ => None,
    })
}

/// A game on `n` of length exactly `m`.
///
/// Small inputs are solved from a cached exhaustive search. Larger inputs
/// either extend a game on `N - 1` by its add-one tail, or play a game on
/// `F_n - 1` and finish greedily. If neither lands on `m`, a bounded
/// backtracking search takes over.
pub fn game_of_length(n: u64, m: u64) -> Result<Game> {
    let iv = achievable_interval(n)?;
    if !iv.contains(m) {
        return Err(Error::LengthOutOfRange {
            n,
            m,
            lo: iv.lo,
            hi: iv.hi,
        });
    }
    let mut b = Builder {
        intervals: HashMap::new(),
        failed: HashSet::new(),
    };
    if let Some(moves) = b.build(n, m)? {
        if moves.len() as u64 == m && replay_counts(n, &moves).is_ok() {
            return Ok(Game::from_trusted(n, moves));
        }
    }
    match search_length(n, m, SEARCH_NODE_BUDGET)? {
        Some(moves) => Ok(Game::from_trusted(n, moves)),
        None => Err(Error::SearchExhausted { n, m }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::parse_moves;

    fn mv(s: &str) -> Vec<Move> {
        parse_moves(s).unwrap()
    }

    fn zeck_heights(n: u64) -> Vec<u64> {
        let z = zeckendorf(n).unwrap();
        z.heights(z.top())
    }

    #[test]
    fn combine_multiset_examples() {
        assert_eq!(combine_multiset(13, &zeck_heights(13)).unwrap().as_slice(), &[5, 3, 2, 1, 1]);
        assert_eq!(combine_multiset(4, &zeck_heights(4)).unwrap().as_slice(), &[1, 1]);
        assert_eq!(combine_multiset(2, &zeck_heights(2)).unwrap().as_slice(), &[1]);
        assert_eq!(combine_multiset(1, &[1]).unwrap().total(), 0);
        assert!(combine_multiset(4, &[0, 0, 2]).is_err());
    }

    #[test]
    fn shortest_examples() {
        assert_eq!(shortest_game(5).unwrap().moves(), mv("C1,C1,C2,C3").as_slice());
        assert_eq!(shortest_game(12).unwrap().len(), 9);
        assert_eq!(shortest_game(2).unwrap().moves(), mv("C1").as_slice());
        assert!(shortest_game(1).unwrap().is_empty());
    }

    #[test]
    fn shortest_matches_multiset() {
        for n in 1..=300 {
            let g = shortest_game(n).unwrap();
            let counts = replay_counts(n, g.moves()).unwrap();
            let cm = combine_multiset(n, &zeck_heights(n)).unwrap();
            for k in 1..fib_index(n).unwrap() {
                assert_eq!(counts.mc(k), cm.mc(k), "N={n} k={k}");
            }
        }
    }

    #[test]
    fn shortest_to_rejects_non_terminal() {
        assert!(shortest_game_to(4, &[2, 1]).is_err());
        assert_eq!(shortest_game_to(4, &[1, 0, 1]).unwrap().len(), 2);
    }

    #[test]
    fn longest_examples() {
        assert_eq!(longest_game(12, TypeAOrder::default()).unwrap().len(), 17);
        assert_eq!(longest_game(4, TypeAOrder::default()).unwrap().len(), 3);
        assert_eq!(longest_game(2, TypeAOrder::default()).unwrap().moves(), mv("C1").as_slice());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(length_upper_bound(12).unwrap(), 17);
        assert_eq!(length_upper_bound(4).unwrap(), 3);
        assert_eq!(length_upper_bound(33).unwrap(), 63);
        assert_eq!(length_upper_bound(1).unwrap(), 0);
    }

    #[test]
    fn tail_examples() {
        assert_eq!(add_one_tail(5).unwrap(), mv("C1,C3"));
        assert_eq!(add_one_tail(3).unwrap(), mv("C2"));
        assert_eq!(add_one_tail(13).unwrap(), mv("C1,C3,C5"));
        assert!(add_one_tail(1).is_err());
    }

    #[test]
    fn tail_length_bound() {
        for n in 2..=3000 {
            let t = add_one_tail(n).unwrap();
            let bins = fib_index(n).unwrap();
            assert!(t.len() <= bins / 2, "N={n}");
            assert!(t.iter().all(Move::is_combine));
            // indices step by two
            assert!(t.windows(2).all(|w| w[1].index == w[0].index + 2), "N={n}");
        }
    }

    #[test]
    fn type_a_examples() {
        assert_eq!(type_a_game(4).unwrap().moves(), mv("C1,C1,S2").as_slice());
        let g = type_a_game(12).unwrap();
        assert_eq!(g.len(), 17);
        assert!(g.moves().iter().all(Move::is_type_a));
        assert_eq!(type_a_game(5).unwrap_err(), Error::NotTypeAExpressible(5));
    }

    #[test]
    fn interval_examples() {
        assert_eq!(achievable_interval(4).unwrap(), LengthInterval { lo: 2, hi: 3 });
        assert_eq!(achievable_interval(5).unwrap(), LengthInterval { lo: 4, hi: 5 });
        assert_eq!(achievable_interval(12).unwrap(), LengthInterval { lo: 9, hi: 17 });
    }

    #[test]
    fn game_of_length_examples() {
        assert_eq!(game_of_length(4, 2).unwrap().moves(), mv("C1,C2").as_slice());
        assert_eq!(game_of_length(4, 3).unwrap().moves(), mv("C1,C1,S2").as_slice());
        for m in 9..=17 {
            assert_eq!(game_of_length(12, m).unwrap().len() as u64, m);
        }
        assert!(matches!(
            game_of_length(12, 18),
            Err(Error::LengthOutOfRange { lo: 9, hi: 17, .. })
        ));
    }

    #[test]
    fn order_insensitive() {
        for n in 1..=60 {
            let lens: Vec<usize> = TypeAOrder::ALL
                .iter()
                .map(|&o| longest_game(n, o).unwrap().len())
                .collect();
            assert!(lens.windows(2).all(|w| w[0] == w[1]), "N={n}: {lens:?}");
        }
    }
}
