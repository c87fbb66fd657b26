//! Finite checks of the structural results, grouped into suites.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::analysis::{
    achievable_length_set, enumerate_games, mod_z_distribution, ratio_f64, sample_counts, shortest_game_count,
    Limits, MeasureKind, SampleConfig,
};
use crate::engine::MoveCounts;
use crate::error::{Error, Result};
use crate::numerics::{fib_u64, zeck_count};
use crate::partitions::{all_classes, m_statistics, partition_check, synthetic_ks, SchemeKind};
use crate::strategies::{
    achievable_interval, game_of_length, length_upper_bound, longest_game, shortest_game, TypeAOrder,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Shortest,
    Longest,
    Interval,
    Movesum,
    Catalan,
    Partition,
    Fairness,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Shortest,
        Suite::Longest,
        Suite::Interval,
        Suite::Movesum,
        Suite::Catalan,
        Suite::Partition,
        Suite::Fairness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Shortest => "shortest",
            Suite::Longest => "longest",
            Suite::Interval => "interval",
            Suite::Movesum => "movesum",
            Suite::Catalan => "catalan",
            Suite::Partition => "partition",
            Suite::Fairness => "fairness",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

impl Serialize for Suite {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Runs one suite. `max_n` overrides the suite's default range.
pub fn run_suite(suite: Suite, max_n: Option<u64>, limits: &Limits) -> Result<Vec<Check>> {
    let mut r = Recorder {
        suite,
        checks: Vec::new(),
    };
    match suite {
        Suite::Shortest => shortest(&mut r, max_n.unwrap_or(2000))?,
        Suite::Longest => longest(&mut r, max_n.unwrap_or(300))?,
        Suite::Interval => interval(&mut r, max_n, limits)?,
        Suite::Movesum => movesum(&mut r, max_n, limits)?,
        // the catalan range is a Fibonacci index
        Suite::Catalan => catalan(&mut r, max_n.unwrap_or(8), limits)?,
        Suite::Partition => partition(&mut r, max_n.unwrap_or(10), limits)?,
        Suite::Fairness => fairness(&mut r, max_n.unwrap_or(36), limits)?,
    }
    Ok(r.checks)
}

/// Runs the given suites in order.
pub fn verify(suites: &[Suite], max_n: Option<u64>, limits: &Limits) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for &s in suites {
        checks.extend(run_suite(s, max_n, limits)?);
    }
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn shortest(r: &mut Recorder, max_n: u64) -> Result<()> {
    let mut bad = None;
    for n in 1..=max_n {
        let g = shortest_game(n)?;
        let want = n - zeck_count(n)?;
        if g.len() as u64 != want {
            bad = Some(format!("N={n}: length {} != {want}", g.len()));
            break;
        }
    }
    r.push(
        format!("shortest game has length N - Z(N) for N <= {max_n}"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    Ok(())
}

fn longest(r: &mut Recorder, max_n: u64) -> Result<()> {
    if max_n >= 12 {
        let l = longest_game(12, TypeAOrder::default())?.len();
        r.push("longest game on 12 has length 17", l == 17, format!("length {l}"));
    }
    let mut bad = None;
    for n in 1..=max_n {
        let l = longest_game(n, TypeAOrder::default())?.len() as u64;
        let b = length_upper_bound(n)?;
        if l > b {
            bad = Some(format!("N={n}: length {l} > bound {b}"));
            break;
        }
    }
    r.push(
        format!("longest game within the upper bound for N <= {max_n}"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    for n in [12, 33, 88].into_iter().filter(|&n| n <= max_n) {
        let l = longest_game(n, TypeAOrder::default())?.len() as u64;
        let b = length_upper_bound(n)?;
        r.push(format!("upper bound is attained at N={n}"), l == b, format!("length {l}, bound {b}"));
    }
    Ok(())
}

fn interval(r: &mut Recorder, max_n: Option<u64>, limits: &Limits) -> Result<()> {
    let (set_max, gol_max) = max_n.map_or((40, 60), |x| (x, x));
    let mut bad = None;
    for n in 1..=set_max {
        let set = achievable_length_set(n, limits)?;
        let iv = achievable_interval(n)?;
        let want: Vec<u64> = (iv.lo..=iv.hi).collect();
        if set.iter().copied().ne(want.iter().copied()) {
            bad = Some(format!("N={n}: lengths {set:?} != [{}, {}]", iv.lo, iv.hi));
            break;
        }
    }
    r.push(
        format!("achievable lengths are contiguous for N <= {set_max}"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    let mut bad = None;
    'outer: for n in 1..=gol_max {
        let iv = achievable_interval(n)?;
        for m in iv.lo..=iv.hi {
            match game_of_length(n, m) {
                Ok(g) if g.len() as u64 == m => {}
                Ok(g) => {
                    bad = Some(format!("N={n}, m={m}: got length {}", g.len()));
                    break 'outer;
                }
                Err(e) => {
                    bad = Some(format!("N={n}, m={m}: {e}"));
                    break 'outer;
                }
            }
        }
    }
    r.push(
        format!("every length in the interval is constructed for N <= {gol_max}"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    Ok(())
}

const DELTAS: [f64; 3] = [0.3, 0.5, 0.7];

#[derive(Default)]
struct CountCheck {
    sums: Option<Vec<u64>>,
    movesum_bad: Option<String>,
    exception_bad: Option<String>,
    ratio_bad: Option<String>,
}

impl CountCheck {
    fn add(&mut self, n: u64, c: &MoveCounts, label: &dyn Fn() -> String) {
        let bins = c.bins();
        let sums: Vec<u64> = (2..bins).map(|k| c.movesum(k)).collect();
        match &self.sums {
            None => self.sums = Some(sums),
            Some(s) if *s != sums && self.movesum_bad.is_none() => {
                self.movesum_bad = Some(format!("N={n}: {} has sums {sums:?}, expected {s:?}", label()));
            }
            _ => {}
        }
        if !c.exception_bound_holds(n) && self.exception_bad.is_none() {
            self.exception_bad = Some(format!("N={n}: {} has MC1 - MS2 = {}", label(), c.exception_diff()));
        }
        for d in DELTAS {
            if !c.high_index_bound_holds(n, d) && self.ratio_bad.is_none() {
                self.ratio_bad = Some(format!("N={n}, delta={d}: {}", label()));
            }
        }
    }
}

fn movesum(r: &mut Recorder, max_n: Option<u64>, limits: &Limits) -> Result<()> {
    let enum_max = max_n.map_or(12, |x| x.min(limits.enumeration_cap));
    let mut all = CountCheck::default();
    for n in 1..=enum_max {
        let mut per_n = CountCheck::default();
        for g in enumerate_games(n, limits.enumeration_cap)? {
            per_n.add(n, &g.counts(), &|| g.to_string());
        }
        all.movesum_bad = all.movesum_bad.or(per_n.movesum_bad);
        all.exception_bad = all.exception_bad.or(per_n.exception_bad);
        all.ratio_bad = all.ratio_bad.or(per_n.ratio_bad);
    }
    let sampled: Vec<u64> = match max_n {
        Some(x) => [50, 100, 200].into_iter().filter(|&n| n <= x).collect(),
        None => vec![50, 100, 200],
    };
    for &n in &sampled {
        let cfg = SampleConfig {
            measure: MeasureKind::RandomPlay,
            seed: 0x5eed ^ n,
            count: 10_000,
            threads: 0,
        };
        let mut per_n = CountCheck::default();
        for (i, c) in sample_counts(n, &cfg, limits)?.iter().enumerate() {
            per_n.add(n, c, &|| format!("sampled game {i}"));
        }
        all.movesum_bad = all.movesum_bad.or(per_n.movesum_bad);
        all.exception_bad = all.exception_bad.or(per_n.exception_bad);
        all.ratio_bad = all.ratio_bad.or(per_n.ratio_bad);
    }
    let scope = format!("all games for N <= {enum_max}, 10^4 random games at N in {sampled:?}");
    r.push(
        format!("move sums constant per N ({scope})"),
        all.movesum_bad.is_none(),
        all.movesum_bad.unwrap_or_default(),
    );
    r.push(
        format!("|MC1 - MS2 - (2 - phi)N| <= phi - 1 ({scope})"),
        all.exception_bad.is_none(),
        all.exception_bad.unwrap_or_default(),
    );
    r.push(
        format!("high-index combine bound for delta in {DELTAS:?} ({scope})"),
        all.ratio_bad.is_none(),
        all.ratio_bad.unwrap_or_default(),
    );
    Ok(())
}

fn catalan(r: &mut Recorder, max_index: u64, limits: &Limits) -> Result<()> {
    for k in 1..=max_index as usize {
        let n = fib_u64(k).expect("small index");
        let c = shortest_game_count(n, limits)?;
        r.push(
            format!("shortest games on F_{k} = {n} at least the Catalan product"),
            c.count >= c.catalan_bound,
            format!("count {}, bound {}", c.count, c.catalan_bound),
        );
    }
    if max_index >= 4 {
        let c = shortest_game_count(5, limits)?;
        r.push("two shortest games on 5", c.count == 2u32.into(), format!("count {}", c.count));
    }
    Ok(())
}

fn partition(r: &mut Recorder, max_n: u64, limits: &Limits) -> Result<()> {
    for scheme in SchemeKind::ALL {
        let mut bad = None;
        for n in 1..=max_n {
            let rep = partition_check(n, scheme, limits)?;
            if !rep.passed {
                bad = Some(format!("N={n}: {}", rep.violation.unwrap_or_default()));
                break;
            }
        }
        r.push(
            format!("{scheme} classes partition the games, sizes and laws exact, N <= {max_n}"),
            bad.is_none(),
            bad.unwrap_or_default(),
        );
    }

    // explicit Bernoulli parameters of the basic scheme
    let mut bad = None;
    let mut bound_bad = None;
    for n in 1..=max_n {
        let bins = crate::numerics::fib_index(n)? as i64;
        let lo = BigRational::new(BigInt::one(), BigInt::from((2 * bins - 2).max(1)));
        let half = BigRational::new(1.into(), 2.into());
        for c in all_classes(n, SchemeKind::BasicPrefix, MeasureKind::RandomPlay, limits)? {
            for (p, &nb) in c.bernoulli_params.iter().zip(&c.branch_counts) {
                let want = BigRational::new(BigInt::one(), BigInt::from(nb + 1));
                if *p != want && bad.is_none() {
                    bad = Some(format!("{}: p = {p}, n_i = {nb}", c.representative));
                }
                if (*p < lo || *p > half) && bound_bad.is_none() {
                    bound_bad = Some(format!("{}: p = {p}", c.representative));
                }
            }
        }
        for c in all_classes(n, SchemeKind::BasicPrefix, MeasureKind::Uniform, limits)? {
            if c.bernoulli_params.iter().any(|p| *p != half) && bad.is_none() {
                bad = Some(format!("{}: uniform parameters {:?}", c.representative, c.bernoulli_params));
            }
        }
    }
    r.push(
        format!("basic scheme choices are Bernoulli(1/(1+n_i)) under random play, 1/2 under uniform, N <= {max_n}"),
        bad.is_none(),
        bad.unwrap_or_default(),
    );
    r.push(
        format!("basic scheme parameters lie in [1/(2n-2), 1/2], N <= {max_n}"),
        bound_bad.is_none(),
        bound_bad.unwrap_or_default(),
    );

    let mut ks_bad = None;
    let half = BigRational::new(1.into(), 2.into());
    let mut prev = f64::INFINITY;
    for m in 1..=200usize {
        let ks = synthetic_ks(&vec![half.clone(); m])?;
        if ks > prev + 1e-12 && ks_bad.is_none() {
            ks_bad = Some(format!("m={m}: {ks} > {prev}"));
        }
        prev = ks;
    }
    r.push(
        "KS does not increase when a fair delimiter is added, m <= 200",
        ks_bad.is_none(),
        ks_bad.unwrap_or_default(),
    );

    // growth of m over a Fibonacci block, both measures
    let hi = 14.min(limits.enumeration_cap);
    for measure in MeasureKind::ALL {
        let mut medians = Vec::new();
        let mut witness_ok = true;
        for n in 8..=hi {
            let s = m_statistics(n, SchemeKind::BasicPrefix, measure, limits)?;
            witness_ok &= s.witness_bounded;
            medians.push((n, s.median_m));
        }
        let (first, last) = (medians[0].1, medians[medians.len() - 1].1);
        r.push(
            format!("median class choice count grows from N=8 to N={hi} ({measure})"),
            last > first,
            format!("medians {medians:?}"),
        );
        r.push(
            format!("C1,C1,C2 occurrences never exceed m, 8 <= N <= {hi} ({measure})"),
            witness_ok,
            String::new(),
        );
    }
    Ok(())
}

/// Exact `|P(first player wins) - 1/2|` under `measure`.
pub fn fairness_deviation(n: u64, measure: MeasureKind, limits: &Limits) -> Result<(f64, Option<BigRational>)> {
    let res = mod_z_distribution(n, measure, 2, limits)?;
    let half = BigRational::new(1.into(), 2.into());
    match &res.exact {
        Some(e) => {
            let d = (&e[1] - &half).abs();
            Ok((ratio_f64(&d), Some(d)))
        }
        None => Ok(((res.values[1] - 0.5).abs(), None)),
    }
}

fn fairness(r: &mut Recorder, hi: u64, limits: &Limits) -> Result<()> {
    let lo = 8.min(hi);
    for measure in MeasureKind::ALL {
        let (d_lo, _) = fairness_deviation(lo, measure, limits)?;
        let (d_hi, exact) = fairness_deviation(hi, measure, limits)?;
        let exact = exact.map_or_else(|| "inexact".to_string(), |e| e.to_string());
        let ok = d_hi < d_lo && d_hi < 0.1;
        r.push(
            format!("first-player advantage shrinks from N={lo} to N={hi} and is below 0.1 ({measure})"),
            ok,
            format!("deviation {d_lo:.6} at N={lo}, {d_hi:.6} at N={hi} (exact {exact})"),
        );
        if !ok {
            // record every N the state budget allows and re-test the trend
            let mut trend = Vec::new();
            for n in lo..=hi {
                match fairness_deviation(n, measure, limits) {
                    Ok((d, e)) => trend.push((n, d, e)),
                    Err(Error::StateBudgetExceeded { .. }) => break,
                    Err(e) => return Err(e),
                }
            }
            let half = trend.len() / 2;
            let peak = |xs: &[(u64, f64, Option<BigRational>)]| xs.iter().map(|x| x.1).fold(0.0, f64::max);
            let (early, late) = (peak(&trend[..half]), peak(&trend[half..]));
            let values: Vec<String> = trend
                .iter()
                .map(|(n, d, e)| match e {
                    Some(e) if e.is_zero() => format!("{n}:0"),
                    _ => format!("{n}:{d:.3e}"),
                })
                .collect();
            r.push(
                format!("first-player advantage trend over N={lo}..={} ({measure})", trend.last().map_or(lo, |t| t.0)),
                late < early && late < 0.1,
                format!("max {early:.3e} on the lower half, {late:.3e} on the upper half; {}", values.join(" ")),
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        let l = Limits::default();
        for (s, max) in [(Suite::Shortest, 14), (Suite::Longest, 14), (Suite::Interval, 14), (Suite::Catalan, 6)] {
            let checks = run_suite(s, Some(max), &l).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        }
    }
}
