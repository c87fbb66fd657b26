//! Fibonacci numbers in the shifted indexing used throughout the crate
//! (`F_1 = 1`, `F_2 = 2`, `F_k = F_{k-1} + F_{k-2}`), Zeckendorf
//! decompositions, Catalan numbers, and exact comparisons against
//! multiples of the golden ratio.
//!
//! `F_0 = 1` is accepted by [`fib`] and [`fib_u64`] because the combine
//! multiset of a shortest game on a Fibonacci input ends in an `F_0` term.
//! Bin 0 is never part of a game board.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest index whose Fibonacci number fits in a `u64`.
pub const MAX_FIB_INDEX_U64: usize = 92;

const FIB_TABLE: [u64; MAX_FIB_INDEX_U64 + 1] = {
    let mut t = [0u64; MAX_FIB_INDEX_U64 + 1];
    t[0] = 1;
    t[1] = 1;
    let mut k = 2;
    while k <= MAX_FIB_INDEX_U64 {
        t[k] = t[k - 1] + t[k - 2];
        k += 1;
    }
    t
};

/// `F_k` as a machine integer, `None` once it no longer fits.
#[inline]
pub fn fib_u64(k: usize) -> Option<u64> {
    FIB_TABLE.get(k).copied()
}

/// `F_k` for arbitrary `k`.
pub fn fib(k: usize) -> BigUint {
    if let Some(v) = fib_u64(k) {
        return BigUint::from(v);
    }
    let mut prev = BigUint::from(FIB_TABLE[MAX_FIB_INDEX_U64 - 1]);
    let mut cur = BigUint::from(FIB_TABLE[MAX_FIB_INDEX_U64]);
    for _ in MAX_FIB_INDEX_U64..k {
        let next = &prev + &cur;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// The unique `n` with `F_n <= N < F_{n+1}`.
pub fn fib_index(n: u64) -> Result<usize> {
    if n == 0 {
        return Err(Error::NonPositiveInput(n));
    }
    // F_1..F_92 are strictly increasing; F_93 overflows and exceeds every u64.
    let idx = FIB_TABLE[1..].partition_point(|&f| f <= n);
    Ok(idx)
}

/// Whether `n = F_k - 1` for some `k >= 2`.
pub fn is_fib_minus_one(n: u64) -> bool {
    n.checked_add(1)
        .map(|m| FIB_TABLE[2..].binary_search(&m).is_ok())
        .unwrap_or(false)
}

/// A Zeckendorf decomposition together with its term count `Z(N)` and index
/// sum `Z_I(N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeckDecomposition {
    value: u64,
    /// `bits[k - 1]` is set when `F_k` is a summand.
    bits: Vec<bool>,
    count: u64,
    index_sum: u64,
}

impl ZeckDecomposition {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Index of the largest summand, equal to `fib_index(N)`.
    pub fn top(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Whether `F_k` is a summand, for 1-based `k`.
    pub fn contains(&self, k: usize) -> bool {
        k >= 1 && self.bits.get(k - 1).copied().unwrap_or(false)
    }

    /// `Z(N)`.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// `Z_I(N)`.
    pub fn index_sum(&self) -> u64 {
        self.index_sum
    }

    /// Summand indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Bin heights of the terminal board, padded with zeros to at least `len`.
    pub fn heights(&self, len: usize) -> Vec<u64> {
        let mut h = vec![0u64; len.max(self.bits.len())];
        for (i, &b) in self.bits.iter().enumerate() {
            h[i] = u64::from(b);
        }
        h
    }
}

/// Greedy largest-first Zeckendorf decomposition.
pub fn zeckendorf(n: u64) -> Result<ZeckDecomposition> {
    let top = fib_index(n)?;
    let mut bits = vec![false; top];
    let mut rest = n;
    let mut k = top;
    while rest > 0 {
        while FIB_TABLE[k] > rest {
            k -= 1;
        }
        bits[k - 1] = true;
        rest -= FIB_TABLE[k];
        // the next summand can't be adjacent
        k = k.saturating_sub(2).max(1);
    }
    let count = bits.iter().filter(|&&b| b).count() as u64;
    let index_sum = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64 + 1)
        .sum();
    Ok(ZeckDecomposition {
        value: n,
        bits,
        count,
        index_sum,
    })
}

/// `Z(N)`, the number of Zeckendorf summands.
pub fn zeck_count(n: u64) -> Result<u64> {
    zeckendorf(n).map(|z| z.count())
}

/// The `m`th Catalan number, `binom(2m, m) / (m + 1)`.
pub fn catalan(m: u64) -> BigUint {
    // C(i+1) = C(i) * 2(2i+1) / (i+2), each step exact
    let mut c = BigUint::one();
    for i in 0..m {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

/// `floor(phi * m)` for a nonnegative integer `m`, computed exactly.
///
/// `phi * m = (m + m*sqrt(5)) / 2`. For `m > 0`, `m*sqrt(5)` is irrational, so
/// `floor(m*sqrt(5)) = isqrt(5 m^2)` and halving preserves the floor.
pub fn floor_phi_times(m: &BigUint) -> BigUint {
    let root = (m * m * 5u32).sqrt();
    (m + root) >> 1
}

/// Compares `phi * m` with the integer `k`, exactly.
pub fn cmp_phi_times(m: &BigInt, k: &BigInt) -> Ordering {
    // phi*m vs k  <=>  m*sqrt(5) vs 2k - m
    let rhs: BigInt = k * 2 - m;
    cmp_sqrt5_times(m, &rhs)
}

/// Compares `sqrt(5) * a` with `b`.
fn cmp_sqrt5_times(a: &BigInt, b: &BigInt) -> Ordering {
    match (a.signum().is_negative(), b.signum().is_negative()) {
        (false, true) => Ordering::Greater,
        (true, false) => Ordering::Less,
        (false, false) => (a * a * BigInt::from(5)).cmp(&(b * b)),
        (true, true) => (b * b).cmp(&(a * a * BigInt::from(5))),
    }
}

/// Golden ratio in double precision, for reporting only.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Successive ratios `F_{k+1} / F_k` for `k = 1..count`, as a sanity report
/// of the convergence to the golden ratio.
pub fn ratio_report(count: usize) -> Vec<f64> {
    (1..=count.min(MAX_FIB_INDEX_U64 - 1))
        .map(|k| FIB_TABLE[k + 1] as f64 / FIB_TABLE[k] as f64)
        .collect()
}
