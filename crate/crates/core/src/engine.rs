//! Board representation, the move alphabet, legal-move enumeration in the
//! canonical order, and whole-game replay with move-count accounting.
//!
//! The canonical order is `C_1, C_2, ..., C_{n-1}, S_2, ..., S_{n-1}`. Every
//! enumerator and sampler in the crate lists moves in this order, so seeded
//! runs are reproducible.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{cmp_phi_times, fib_index, fib_u64, zeckendorf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Combine,
    Split,
}

/// `C_k` or `S_k`. Combines are valid for `k >= 1`, splits for `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub kind: MoveKind,
    pub index: u32,
}

impl Move {
    pub const fn combine(k: u32) -> Move {
        Move {
            kind: MoveKind::Combine,
            index: k,
        }
    }

    pub const fn split(k: u32) -> Move {
        Move {
            kind: MoveKind::Split,
            index: k,
        }
    }

    pub fn is_combine(&self) -> bool {
        self.kind == MoveKind::Combine
    }

    pub fn is_split(&self) -> bool {
        self.kind == MoveKind::Split
    }

    /// `C_1` and every split.
    pub fn is_type_a(&self) -> bool {
        match self.kind {
            MoveKind::Combine => self.index == 1,
            MoveKind::Split => true,
        }
    }

    /// Combines `C_k` with `k >= 2`.
    pub fn is_type_b(&self) -> bool {
        !self.is_type_a()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            MoveKind::Combine => 'C',
            MoveKind::Split => 'S',
        };
        write!(f, "{c}{}", self.index)
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.as_bytes().first() {
            Some(b'C') => (MoveKind::Combine, &s[1..]),
            Some(b'S') => (MoveKind::Split, &s[1..]),
            _ => return Err(Error::Parse(format!("bad move token {s:?}"))),
        };
        // reject signs and whitespace that u32::from_str would otherwise accept
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad move token {s:?}")));
        }
        let index: u32 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad move index in {s:?}")))?;
        let min = if kind == MoveKind::Combine { 1 } else { 2 };
        if index < min || rest.starts_with('0') {
            return Err(Error::Parse(format!("bad move index in {s:?}")));
        }
        Ok(Move { kind, index })
    }
}

impl Serialize for Move {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Bin heights `h_1..h_L` with `L = fib_index(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    n: u64,
    heights: Vec<u64>,
}

impl GameState {
    /// `N` tokens of value `F_1`.
    pub fn initial(n: u64) -> Result<Self> {
        let bins = fib_index(n)?;
        let mut heights = vec![0; bins];
        heights[0] = n;
        Ok(GameState { n, heights })
    }

    /// Board with the given heights (bin 1 first), which must sum to `n` in
    /// token value and fit within `fib_index(n)` bins.
    pub fn from_heights(n: u64, heights: &[u64]) -> Result<Self> {
        let bins = fib_index(n)?;
        let used = heights.iter().rposition(|&h| h > 0).map_or(0, |i| i + 1);
        if used > bins {
            return Err(Error::InvalidTarget(format!(
                "token in bin {used} exceeds the board of {bins} bins"
            )));
        }
        let mut full = vec![0; bins];
        full[..used].copy_from_slice(&heights[..used]);
        let state = GameState { n, heights: full };
        if state.value() != u128::from(n) {
            return Err(Error::InvalidTarget(format!(
                "heights sum to {} rather than {n}",
                state.value()
            )));
        }
        Ok(state)
    }

    /// Terminal board of the game on `n`.
    pub fn zeckendorf_state(n: u64) -> Result<Self> {
        let z = zeckendorf(n)?;
        Ok(GameState {
            n,
            heights: z.heights(z.top()),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of bins on the board.
    pub fn bins(&self) -> usize {
        self.heights.len()
    }

    pub fn heights(&self) -> &[u64] {
        &self.heights
    }

    /// Height of bin `k` (1-based); zero outside the board.
    #[inline]
    pub fn height(&self, k: usize) -> u64 {
        if k == 0 {
            return 0;
        }
        self.heights.get(k - 1).copied().unwrap_or(0)
    }

    /// Heights with trailing empty bins removed.
    pub fn trimmed(&self) -> &[u64] {
        let used = self.heights.iter().rposition(|&h| h > 0).map_or(0, |i| i + 1);
        &self.heights[..used]
    }

    pub fn token_count(&self) -> u64 {
        self.heights.iter().sum()
    }

    /// Total token value `sum h_k F_k`.
    pub fn value(&self) -> u128 {
        self.heights
            .iter()
            .enumerate()
            .map(|(i, &h)| u128::from(h) * u128::from(fib_u64(i + 1).unwrap_or(u64::MAX)))
            .sum()
    }

    /// `Ok` when `m` is playable, otherwise the failed precondition.
    pub fn check(&self, m: Move) -> std::result::Result<(), &'static str> {
        let k = m.index as usize;
        let bins = self.bins();
        match m.kind {
            MoveKind::Combine => {
                if k == 0 || k >= bins {
                    return Err("combine index outside the board");
                }
                if k == 1 {
                    if self.heights[0] < 2 {
                        return Err("C1 needs h_1 >= 2");
                    }
                } else if self.heights[k - 2] == 0 || self.heights[k - 1] == 0 {
                    return Err("C_k needs h_{k-1} >= 1 and h_k >= 1");
                }
            }
            MoveKind::Split => {
                if k < 2 || k >= bins {
                    return Err("split index outside the board");
                }
                if self.heights[k - 1] < 2 {
                    return Err("S_k needs h_k >= 2");
                }
            }
        }
        Ok(())
    }

    pub fn is_legal(&self, m: Move) -> bool {
        self.check(m).is_ok()
    }

    /// Calls `f` for every legal move in canonical order.
    #[inline]
    pub fn for_each_legal(&self, mut f: impl FnMut(Move)) {
        let h = &self.heights;
        let bins = h.len();
        if bins >= 2 && h[0] >= 2 {
            f(Move::combine(1));
        }
        for k in 2..bins {
            if h[k - 2] > 0 && h[k - 1] > 0 {
                f(Move::combine(k as u32));
            }
        }
        for k in 2..bins {
            if h[k - 1] >= 2 {
                f(Move::split(k as u32));
            }
        }
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        self.for_each_legal(|m| out.push(m));
        out
    }

    pub fn legal_move_count(&self) -> usize {
        let mut c = 0;
        self.for_each_legal(|_| c += 1);
        c
    }

    pub fn is_terminal(&self) -> bool {
        self.legal_move_count() == 0
    }

    /// Whether the board equals the Zeckendorf decomposition of `N`.
    pub fn is_zeckendorf(&self) -> bool {
        let h = &self.heights;
        h.iter().all(|&x| x <= 1) && h.windows(2).all(|w| w[0] + w[1] <= 1)
    }

    pub fn apply(&self, m: Move) -> Result<GameState> {
        let mut next = self.clone();
        next.apply_mut(m)?;
        Ok(next)
    }

    pub fn apply_mut(&mut self, m: Move) -> Result<()> {
        self.check(m).map_err(|reason| Error::IllegalMove {
            step: None,
            mv: m,
            reason,
        })?;
        self.apply_unchecked(m);
        Ok(())
    }

    /// Applies a move already known to be legal.
    #[inline]
    pub(crate) fn apply_unchecked(&mut self, m: Move) {
        let k = m.index as usize;
        let h = &mut self.heights;
        match (m.kind, k) {
            (MoveKind::Combine, 1) => {
                h[0] -= 2;
                h[1] += 1;
            }
            (MoveKind::Combine, _) => {
                h[k - 2] -= 1;
                h[k - 1] -= 1;
                h[k] += 1;
            }
            (MoveKind::Split, 2) => {
                h[1] -= 2;
                h[0] += 1;
                h[2] += 1;
            }
            (MoveKind::Split, _) => {
                h[k - 1] -= 2;
                h[k - 3] += 1;
                h[k] += 1;
            }
        }
    }
}

/// Per-move tallies for a game on a board of `n` bins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoveCounts {
    #[serde(skip)]
    bins: usize,
    /// `mc[i]` is `MC_{i+1}`, for `C_1..C_{n-1}`.
    mc: Vec<u64>,
    /// `ms[i]` is `MS_{i+2}`, for `S_2..S_{n-1}`.
    ms: Vec<u64>,
    type_a_total: u64,
    type_b_total: u64,
}

impl MoveCounts {
    pub fn new(bins: usize) -> Self {
        MoveCounts {
            bins,
            mc: vec![0; bins.saturating_sub(1)],
            ms: vec![0; bins.saturating_sub(2)],
            type_a_total: 0,
            type_b_total: 0,
        }
    }

    #[inline]
    pub fn record(&mut self, m: Move) {
        let k = m.index as usize;
        match m.kind {
            MoveKind::Combine => self.mc[k - 1] += 1,
            MoveKind::Split => self.ms[k - 2] += 1,
        }
        if m.is_type_a() {
            self.type_a_total += 1;
        } else {
            self.type_b_total += 1;
        }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// `MC_k`; zero outside `1..n`.
    pub fn mc(&self, k: usize) -> u64 {
        if k == 0 {
            return 0;
        }
        self.mc.get(k - 1).copied().unwrap_or(0)
    }

    /// `MS_k`; zero outside `2..n`.
    pub fn ms(&self, k: usize) -> u64 {
        if k < 2 {
            return 0;
        }
        self.ms.get(k - 2).copied().unwrap_or(0)
    }

    pub fn combines(&self) -> u64 {
        self.mc.iter().sum()
    }

    pub fn splits(&self) -> u64 {
        self.ms.iter().sum()
    }

    pub fn len(&self) -> u64 {
        self.type_a_total + self.type_b_total
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn type_a_total(&self) -> u64 {
        self.type_a_total
    }

    pub fn type_b_total(&self) -> u64 {
        self.type_b_total
    }

    /// `MS_k + MC_k + MC_{k+1} + ... + MC_{n-1}`, constant over all complete
    /// games on a fixed input for `2 <= k <= n-1`.
    pub fn movesum(&self, k: usize) -> u64 {
        self.ms(k) + (k..self.bins).map(|j| self.mc(j)).sum::<u64>()
    }

    /// `MC_1 - MS_2`.
    pub fn exception_diff(&self) -> i64 {
        self.mc(1) as i64 - self.ms(2) as i64
    }

    /// Whether `|MC_1 - MS_2 - (2 - phi) N| <= phi - 1`, decided exactly.
    pub fn exception_bound_holds(&self, n: u64) -> bool {
        let d = BigInt::from(self.exception_diff());
        let n = BigInt::from(n);
        // phi(N-1) <= 2N - D - 1  and  phi(N+1) >= 2N - D + 1
        let upper = cmp_phi_times(&(&n - 1), &(&n * 2 - &d - 1)).is_le();
        let lower = cmp_phi_times(&(&n + 1), &(&n * 2 - &d + 1)).is_ge();
        upper && lower
    }

    /// Number of combines `C_k` with `k > delta * n`.
    pub fn high_index_combines(&self, delta: f64) -> u64 {
        let cut = delta * self.bins as f64;
        (1..self.bins)
            .filter(|&k| k as f64 > cut)
            .map(|k| self.mc(k))
            .sum()
    }

    /// Whether `high_index_combines(delta) <= (N - 1) / (floor(delta n / 2) + 1)`.
    pub fn high_index_bound_holds(&self, n: u64, delta: f64) -> bool {
        let denom = (delta * self.bins as f64 / 2.0).floor() as u64 + 1;
        self.high_index_combines(delta) * denom <= n.saturating_sub(1)
    }
}

/// Result of replaying a complete game.
#[derive(Debug, Clone)]
pub struct Replay {
    pub counts: MoveCounts,
    /// Heights after each move; `trace[i]` follows move `i + 1`.
    pub trace: Vec<Vec<u64>>,
}

fn replay_inner(n: u64, moves: &[Move], mut on_state: impl FnMut(&GameState)) -> Result<MoveCounts> {
    let mut state = GameState::initial(n)?;
    let mut counts = MoveCounts::new(state.bins());
    for (i, &m) in moves.iter().enumerate() {
        state.check(m).map_err(|reason| Error::IllegalMove {
            step: Some(i + 1),
            mv: m,
            reason,
        })?;
        state.apply_unchecked(m);
        debug_assert_eq!(state.value(), u128::from(n));
        counts.record(m);
        on_state(&state);
    }
    let remaining = state.legal_move_count();
    debug_assert_eq!(remaining == 0, state.is_zeckendorf());
    if remaining > 0 {
        return Err(Error::NonTerminalEnd { remaining });
    }
    Ok(counts)
}

/// Replays `moves` from the initial board of `n`, checking legality at each
/// step and terminality at the end.
pub fn validate_game(n: u64, moves: &[Move]) -> Result<Replay> {
    let mut trace = Vec::with_capacity(moves.len());
    let counts = replay_inner(n, moves, |s| trace.push(s.heights().to_vec()))?;
    Ok(Replay { counts, trace })
}

/// [`validate_game`] without the per-move trace.
pub fn replay_counts(n: u64, moves: &[Move]) -> Result<MoveCounts> {
    replay_inner(n, moves, |_| {})
}

/// A complete, replay-validated game.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Game {
    n: u64,
    moves: Vec<Move>,
}

impl Game {
    pub fn new(n: u64, moves: Vec<Move>) -> Result<Self> {
        replay_counts(n, &moves)?;
        Ok(Game { n, moves })
    }

    /// Wraps moves produced by a constructor that already guarantees validity.
    pub(crate) fn from_trusted(n: u64, moves: Vec<Move>) -> Self {
        debug_assert!(replay_counts(n, &moves).is_ok());
        Game { n, moves }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn into_moves(self) -> Vec<Move> {
        self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn counts(&self) -> MoveCounts {
        replay_counts(self.n, &self.moves).expect("Game is validated on construction")
    }

    pub fn replay(&self) -> Replay {
        validate_game(self.n, &self.moves).expect("Game is validated on construction")
    }

    /// Boards before each move, followed by the terminal board.
    pub fn states(&self) -> Vec<GameState> {
        let mut s = GameState::initial(self.n).expect("n >= 1");
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        out.push(s.clone());
        for &m in &self.moves {
            s.apply_unchecked(m);
            out.push(s.clone());
        }
        out
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for (i, m) in self.moves.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for Game {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) || n.starts_with('0') {
            return Err(Error::Parse(format!("bad game input {n:?}")));
        }
        let n: u64 = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad game input {n:?}")))?;
        let moves = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(str::parse).collect::<Result<Vec<Move>>>()?
        };
        Game::new(n, moves)
    }
}

impl Serialize for Game {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a comma-separated move list such as `C1,C1,S2`.
pub fn parse_moves(s: &str) -> Result<Vec<Move>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moves(s: &str) -> Vec<Move> {
        parse_moves(s).unwrap()
    }

    #[test]
    fn initial_states() {
        assert_eq!(GameState::initial(4).unwrap().heights(), &[4, 0, 0]);
        let one = GameState::initial(1).unwrap();
        assert_eq!(one.heights(), &[1]);
        assert!(one.is_terminal());
        assert_eq!(GameState::initial(13).unwrap().heights(), &[13, 0, 0, 0, 0, 0]);
        assert!(GameState::initial(0).is_err());
    }

    #[test]
    fn legal_moves_in_canonical_order() {
        let s = GameState::initial(4).unwrap();
        assert_eq!(s.legal_moves(), moves("C1"));
        let s = GameState::from_heights(3, &[1, 1]).unwrap();
        assert_eq!(s.legal_moves(), moves("C2"));
        let s = GameState::from_heights(5, &[0, 0, 0, 1]).unwrap();
        assert!(s.legal_moves().is_empty());
        let s = GameState::from_heights(11, &[2, 2, 0, 1]).unwrap();
        assert_eq!(s.legal_moves(), moves("C1,C2,S2"));
    }

    #[test]
    fn apply_rules() {
        let s = GameState::initial(4).unwrap().apply(Move::combine(1)).unwrap();
        assert_eq!(s.heights(), &[2, 1, 0]);
        let s = GameState::from_heights(4, &[0, 2]).unwrap().apply(Move::split(2)).unwrap();
        assert_eq!(s.heights(), &[1, 0, 1]);
        let s = GameState::from_heights(6, &[0, 0, 2]).unwrap().apply(Move::split(3)).unwrap();
        assert_eq!(s.heights(), &[1, 0, 0, 1]);
    }

    #[test]
    fn illegal_move_names_precondition() {
        let s = GameState::initial(4).unwrap();
        match s.apply(Move::combine(2)) {
            Err(Error::IllegalMove { step: None, mv, reason }) => {
                assert_eq!(mv, Move::combine(2));
                assert!(reason.contains("h_{k-1}"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(s.apply(Move::split(5)).is_err());
    }

    #[test]
    fn validate_examples() {
        let r = validate_game(4, &moves("C1,C2")).unwrap();
        assert_eq!(r.counts.len(), 2);
        assert_eq!((r.counts.mc(1), r.counts.mc(2)), (1, 1));
        assert_eq!(r.trace, vec![vec![2, 1, 0], vec![1, 0, 1]]);

        let r = validate_game(4, &moves("C1,C1,S2")).unwrap();
        assert_eq!(r.counts.len(), 3);
        assert_eq!(r.counts.type_b_total(), 0);

        assert!(matches!(
            validate_game(4, &moves("C2")),
            Err(Error::IllegalMove { step: Some(1), .. })
        ));
        assert_eq!(
            validate_game(4, &moves("C1")).unwrap_err(),
            Error::NonTerminalEnd { remaining: 2 }
        );
    }

    #[test]
    fn game_text_round_trip() {
        let g: Game = "4:C1,C1,S2".parse().unwrap();
        assert_eq!(g.to_string(), "4:C1,C1,S2");
        let g: Game = "1:".parse().unwrap();
        assert!(g.is_empty());
        assert_eq!(g.to_string(), "1:");
        for bad in ["4:C1,C2,", "4:c1", "04:C1,C2", "4:C01,C2", "4:S1", "4:C+1", ":C1", "4"] {
            assert!(bad.parse::<Game>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exception_bound_exact() {
        let mut c = MoveCounts::new(3);
        // N = 4: (2 - phi) * 4 = 1.528; D = 1 is within 0.618, D = 2 also (0.472)
        c.record(Move::combine(1));
        assert!(c.exception_bound_holds(4));
        c.record(Move::combine(1));
        assert!(c.exception_bound_holds(4));
        c.record(Move::combine(1));
        assert!(!c.exception_bound_holds(4));
    }

    #[test]
    fn type_classes() {
        assert!(Move::combine(1).is_type_a());
        assert!(Move::split(5).is_type_a());
        assert!(Move::combine(2).is_type_b());
    }
}
