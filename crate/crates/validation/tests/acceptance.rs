//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use zeckgame::analysis::{
    achievable_length_set, enumerate_games, length_distribution, sample_counts, sample_lengths,
    shortest_game_count, Limits, MeasureKind, SampleConfig,
};
use zeckgame::numerics::{fib_u64, zeck_count};
use zeckgame::partitions::{all_classes, partition_check, SchemeKind};
use zeckgame::stats::{binom_mod_z, binomial_atoms, chi_square_gof, sample_summary, summarize_exact};
use zeckgame::strategies::{
    achievable_interval, game_of_length, length_upper_bound, longest_game, shortest_game, TypeAOrder,
};
use zeckgame::verify::fairness_deviation;
use zeckgame::validate_game;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Duration, fn(&Limits) -> Outcome);

fn shortest_games() -> Outcome {
    for n in 1..=2000 {
        let g = shortest_game(n).unwrap();
        let want = n - zeck_count(n).unwrap();
        if let Err(e) = validate_game(n, g.moves()) {
            return outcome(false, format!("N={n}: {e}"));
        }
        if g.len() as u64 != want {
            return outcome(false, format!("N={n}: length {} != {want}", g.len()));
        }
    }
    outcome(true, "N <= 2000, length N - Z(N)")
}

fn longest_games() -> Outcome {
    let l12 = longest_game(12, TypeAOrder::default()).unwrap().len();
    if l12 != 17 {
        return outcome(false, format!("longest(12) = {l12}"));
    }
    for n in 1..=300 {
        let l = longest_game(n, TypeAOrder::default()).unwrap().len() as u64;
        let b = length_upper_bound(n).unwrap();
        if l > b {
            return outcome(false, format!("N={n}: {l} > bound {b}"));
        }
        if [12, 33, 88].contains(&n) && l != b {
            return outcome(false, format!("N={n}: {l} != bound {b}"));
        }
    }
    outcome(true, "longest(12) = 17; bound holds N <= 300; sharp at 12, 33, 88")
}

fn interval(limits: &Limits) -> Outcome {
    for n in 1..=40 {
        let set = achievable_length_set(n, limits).unwrap();
        let iv = achievable_interval(n).unwrap();
        if !set.iter().copied().eq(iv.lo..=iv.hi) {
            return outcome(false, format!("N={n}: achievable set is not [{}, {}]", iv.lo, iv.hi));
        }
    }
    let mut built = 0u64;
    for n in 1..=60 {
        let iv = achievable_interval(n).unwrap();
        for m in iv.lo..=iv.hi {
            match game_of_length(n, m) {
                Ok(g) if g.len() as u64 == m && validate_game(n, g.moves()).is_ok() => built += 1,
                Ok(g) => return outcome(false, format!("N={n}, m={m}: got {g}")),
                Err(e) => return outcome(false, format!("N={n}, m={m}: {e}")),
            }
        }
    }
    outcome(true, format!("contiguous for N <= 40; {built} games of every length for N <= 60"))
}

fn conservation(limits: &Limits) -> Outcome {
    let mut checked = 0u64;
    let mut check = |n: u64, counts: &[zeckgame::MoveCounts]| -> Result<(), String> {
        let first = &counts[0];
        let want: Vec<u64> = (2..first.bins()).map(|k| first.movesum(k)).collect();
        for c in counts {
            checked += 1;
            let got: Vec<u64> = (2..c.bins()).map(|k| c.movesum(k)).collect();
            if got != want {
                return Err(format!("N={n}: move sums {got:?} != {want:?}"));
            }
            if !c.exception_bound_holds(n) {
                return Err(format!("N={n}: MC1 - MS2 = {}", c.exception_diff()));
            }
            for d in [0.3, 0.5, 0.7] {
                if !c.high_index_bound_holds(n, d) {
                    return Err(format!("N={n}: high-index bound fails at delta={d}"));
                }
            }
        }
        Ok(())
    };
    for n in 1..=12 {
        let counts: Vec<_> = enumerate_games(n, limits.enumeration_cap).unwrap().map(|g| g.counts()).collect();
        if let Err(e) = check(n, &counts) {
            return outcome(false, e);
        }
    }
    for n in [50u64, 100, 200] {
        let cfg = SampleConfig {
            measure: MeasureKind::RandomPlay,
            seed: 4_000 + n,
            count: 10_000,
            threads: 0,
        };
        let counts = sample_counts(n, &cfg, limits).unwrap();
        if let Err(e) = check(n, &counts) {
            return outcome(false, e);
        }
    }
    outcome(true, format!("{checked} games checked"))
}

fn catalan(limits: &Limits) -> Outcome {
    let mut detail = Vec::new();
    for k in 1..=8 {
        let n = fib_u64(k).unwrap();
        let c = shortest_game_count(n, limits).unwrap();
        if c.count < c.catalan_bound {
            return outcome(false, format!("F_{k}={n}: {} < {}", c.count, c.catalan_bound));
        }
        detail.push(format!("{n}:{}", c.count));
    }
    let five = shortest_game_count(5, limits).unwrap().count;
    outcome(five == 2u32.into(), format!("counts {}", detail.join(" ")))
}

fn partitions(limits: &Limits) -> Outcome {
    let half = BigRational::new(1.into(), 2.into());
    let mut classes = 0u64;
    for n in 1..=10 {
        for scheme in SchemeKind::ALL {
            let r = partition_check(n, scheme, limits).unwrap();
            if !r.passed {
                return outcome(false, format!("N={n} {scheme}: {}", r.violation.unwrap_or_default()));
            }
            classes += r.classes;
        }
        for c in all_classes(n, SchemeKind::BasicPrefix, MeasureKind::RandomPlay, limits).unwrap() {
            for (p, &b) in c.bernoulli_params.iter().zip(&c.branch_counts) {
                if *p != BigRational::new(BigInt::one(), BigInt::from(b + 1)) {
                    return outcome(false, format!("{}: p = {p} with n_i = {b}", c.representative));
                }
            }
        }
        for c in all_classes(n, SchemeKind::BasicPrefix, MeasureKind::Uniform, limits).unwrap() {
            if c.bernoulli_params.iter().any(|p| *p != half) {
                return outcome(false, format!("{}: uniform parameters not 1/2", c.representative));
            }
        }
    }
    outcome(true, format!("{classes} classes over N <= 10 and three schemes, exact"))
}

fn fairness(limits: &Limits) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for measure in MeasureKind::ALL {
        let (d8, e8) = fairness_deviation(8, measure, limits).unwrap();
        let (d36, e36) = fairness_deviation(36, measure, limits).unwrap();
        let ok = d36 < d8 && d36 < 0.1;
        passed &= ok;
        let show = |d: f64, e: &Option<BigRational>| match e {
            Some(e) if e.is_zero() => "0 (exact)".to_string(),
            Some(_) => format!("{d:.3e} (exact)"),
            None => format!("{d:.3e}"),
        };
        parts.push(format!("{measure}: |P1 - 1/2| = {} at N=8, {} at N=36", show(d8, &e8), show(d36, &e36)));
        if !ok {
            let mut trend = Vec::new();
            for n in 8..=36 {
                match fairness_deviation(n, measure, limits) {
                    Ok((d, _)) => trend.push(format!("{n}:{d:.2e}")),
                    Err(_) => break,
                }
            }
            println!("    note: {measure} trend {}", trend.join(" "));
        }
    }
    outcome(passed, parts.join("; "))
}

fn desk_probe(limits: &Limits) -> Outcome {
    let n = 100_000u64;
    let cfg = SampleConfig {
        measure: MeasureKind::RandomPlay,
        seed: 20_240_601,
        count: 10_000,
        threads: 0,
    };
    let lengths = sample_lengths(n, &cfg, limits).unwrap();
    let s = sample_summary(&lengths);
    let nf = n as f64;
    let (mean, var) = (s.mean / nf, s.variance / nf);
    let skew = s.skewness.unwrap_or(f64::NAN);
    let ok = (0.205..=0.225).contains(&mean) && (0.10..=0.35).contains(&var) && skew.abs() < 0.5;
    println!("    note: (mean - N)/N = {:.5}", (s.mean - nf) / nf);
    outcome(ok, format!("mean/N = {mean:.5}, variance/N = {var:.5}, skewness = {skew:.4}"))
}

fn samplers(limits: &Limits) -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for measure in MeasureKind::ALL {
        let exact = length_distribution(12, measure, limits).unwrap();
        let cfg = SampleConfig {
            measure,
            seed: 12,
            count: 100_000,
            threads: 0,
        };
        let lengths = sample_lengths(12, &cfg, limits).unwrap();
        let chi = chi_square_gof(&lengths, &exact.probabilities());
        passed &= chi.p_value > 1e-3;
        parts.push(format!("{measure} p = {:.4}", chi.p_value));

        let run = |threads| {
            let cfg = SampleConfig {
                measure,
                seed: 77,
                count: 5_000,
                threads,
            };
            sample_lengths(30, &cfg, limits).unwrap()
        };
        let same = run(1) == run(8);
        passed &= same;
        parts.push(format!("{measure} 1 vs 8 threads {}", if same { "identical" } else { "differ" }));
    }
    outcome(passed, parts.join("; "))
}

fn ks_machinery() -> Outcome {
    let half = BigRational::new(1.into(), 2.into());
    let ks = |m| summarize_exact(&binomial_atoms(m, &half)).ks_to_normal.unwrap();
    let (k30, k200) = (ks(30), ks(200));
    let third = BigRational::new(1.into(), 3.into());
    let mut bad = None;
    for m in 0..=40u64 {
        let r = binom_mod_z(m, third.clone(), 2);
        let dev = (&r[0] - &half).abs();
        let want = Pow::pow(&third, m as u32) / BigRational::from_integer(2.into());
        if dev != want {
            bad = Some(m);
            break;
        }
    }
    let ok = k30 < 0.1 && k200 < 0.04 && bad.is_none();
    outcome(
        ok,
        format!(
            "KS(30) = {k30:.5}, KS(200) = {k200:.5}; parity identity {}",
            bad.map_or("exact for m <= 40".into(), |m| format!("fails at m={m}"))
        ),
    )
}

fn main() -> ExitCode {
    let limits = Limits::from_env();
    let criteria: [Criterion; 10] = [
        ("1 shortest games", Duration::from_secs(5), |_| shortest_games()),
        ("2 longest game and bound", Duration::from_secs(30), |_| longest_games()),
        ("3 interval of lengths", Duration::from_secs(120), interval),
        ("4 conservation laws", Duration::from_secs(60), conservation),
        ("5 catalan bound", Duration::from_secs(60), catalan),
        ("6 partitions", Duration::from_secs(60), partitions),
        ("7 fairness", Duration::from_secs(120), fairness),
        ("8 random-play length at N=10^5", Duration::from_secs(180), desk_probe),
        ("9 samplers", Duration::from_secs(60), samplers),
        ("10 KS machinery", Duration::from_secs(10), |_| ks_machinery()),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let t = Instant::now();
        let o = run(&limits);
        let took = t.elapsed();
        let in_time = took < budget;
        let passed = o.passed && in_time;
        if !passed {
            failed += 1;
        }
        let time_note = if in_time { String::new() } else { format!(", over the {budget:?} budget") };
        println!(
            "{} criterion {name}: {} [{:.2?}{time_note}]",
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            took
        );
    }
    println!("{} of {} criteria passed", 10 - failed, 10);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
