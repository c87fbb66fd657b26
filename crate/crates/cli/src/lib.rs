//! Command-line driver: argument parsing and JSON rendering for `zeckgame`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use zeckgame::analysis::{
    length_distribution, mod_z_distribution, ratio_f64, sample_lengths, LengthDistribution, Limits, MeasureKind,
    SampleConfig, Weights,
};
use zeckgame::numerics::fib_u64;
use zeckgame::partitions::{all_classes, sampled_classes, ClassSummary, SchemeKind};
use zeckgame::stats::{sample_summary, summarize, SummaryStats};
use zeckgame::strategies::{game_of_length, longest_game, shortest_game, type_a_game, TypeAOrder};
use zeckgame::verify::{verify, Suite};
use zeckgame::{zeckendorf, Game};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "zeckgame", version, about = "Exact analysis of the two-player Zeckendorf game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Shortest,
    Longest,
    TypeA,
    Length(u64),
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "shortest" => Ok(Strategy::Shortest),
            "longest" => Ok(Strategy::Longest),
            "type-a" => Ok(Strategy::TypeA),
            _ => match s.strip_prefix("length=") {
                Some(m) => m.parse().map(Strategy::Length).map_err(|e| format!("bad length {m:?}: {e}")),
                None => Err(format!("unknown strategy {s:?}")),
            },
        }
    }
}

fn parse_core<T: FromStr<Err = zeckgame::Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: zeckgame::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zeckendorf decomposition of N.
    Zeck { n: u64 },
    /// Play one game with a fixed strategy.
    Play {
        n: u64,
        #[arg(long, value_parser = Strategy::from_str)]
        strategy: Strategy,
        /// lowest-first, highest-first, c1-last or c1-first
        #[arg(long, value_parser = parse_core::<TypeAOrder>)]
        type_a_order: Option<TypeAOrder>,
    },
    /// Exact length distribution.
    Distribution {
        n: u64,
        #[arg(long, value_parser = parse_core::<MeasureKind>)]
        measure: MeasureKind,
        /// Also write `length,weight` rows here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Seeded Monte Carlo game lengths.
    Simulate {
        n: u64,
        #[arg(long, value_parser = parse_core::<MeasureKind>)]
        measure: MeasureKind,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// 0 uses every core; output does not depend on it.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Also write one `game,length` row per game here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Probabilities of the game length modulo Z.
    Odds {
        n: u64,
        #[arg(long, value_parser = parse_core::<MeasureKind>)]
        measure: MeasureKind,
        #[arg(long = "mod", default_value_t = 2)]
        modulus: u64,
    },
    /// Per-class records of a partition scheme.
    Partition {
        n: u64,
        #[arg(long, value_parser = parse_core::<SchemeKind>)]
        scheme: SchemeKind,
        #[arg(long, value_parser = parse_core::<MeasureKind>)]
        measure: MeasureKind,
        /// Only classes with at least this many free choices.
        #[arg(long, default_value_t = 0)]
        min_m: u64,
        /// Take classes from this many sampled games instead of enumerating.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the verification suites. Exits non-zero if any check fails.
    Verify {
        /// shortest, longest, interval, movesum, catalan, partition, fairness or all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        max_n: Option<u64>,
    },
}

/// Output of one invocation.
pub struct Outcome {
    pub json: Value,
    pub success: bool,
}

fn envelope(command: &str, n: Option<u64>, params: Value, result: Value) -> Value {
    json!({
        "version": VERSION,
        "n": n,
        "command": command,
        "params": params,
        "result": result,
    })
}

fn stats_json(s: &SummaryStats) -> Value {
    serde_json::to_value(s).expect("plain struct")
}

fn game_json(g: &Game) -> Value {
    json!({
        "game": g.to_string(),
        "length": g.len(),
        "moves": g.moves().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "counts": g.counts(),
    })
}

fn distribution_json(d: &LengthDistribution) -> Value {
    let weights: Vec<Value> = match d.weights() {
        Weights::Counts(v) => v
            .iter()
            .enumerate()
            .map(|(i, c)| json!([d.min_length() + i as u64, c.to_string()]))
            .collect(),
        Weights::Exact(v) => v
            .iter()
            .enumerate()
            .map(|(i, p)| json!([d.min_length() + i as u64, p.to_string()]))
            .collect(),
        Weights::Approx(v) => v
            .iter()
            .enumerate()
            .map(|(i, p)| json!([d.min_length() + i as u64, p]))
            .collect(),
    };
    json!({
        "measure": d.measure(),
        "weight_kind": d.weight_kind(),
        "min_length": d.min_length(),
        "max_length": d.max_length(),
        "total_games": d.total_games().map(|t| t.to_string()),
        "weights": weights,
        "summary": stats_json(&summarize(d)),
    })
}

fn class_json(c: &ClassSummary) -> Value {
    json!({
        "rep": c.representative.to_string(),
        "base": c.base.to_string(),
        "scheme": c.scheme,
        "m": c.m,
        "class_size": c.class_size.to_string(),
        "p_i": c.bernoulli_params.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "n_i": c.branch_counts,
        "ks": c.ks().ok(),
        "class_prob": c.class_prob.to_string(),
        "class_prob_f64": ratio_f64(&c.class_prob),
    })
}

fn write_file(path: &PathBuf, body: &str) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

/// Executes one command.
pub fn execute(cmd: &Command, limits: &Limits) -> Result<Outcome> {
    let ok = |json| Ok(Outcome { json, success: true });
    match cmd {
        Command::Zeck { n } => {
            let z = zeckendorf(*n)?;
            let indices = z.indices();
            let summands: Vec<u64> = indices.iter().map(|&k| fib_u64(k).expect("fits")).collect();
            ok(envelope(
                "zeck",
                Some(*n),
                json!({}),
                json!({
                    "indices": indices,
                    "summands": summands,
                    "count": z.count(),
                    "index_sum": z.index_sum(),
                }),
            ))
        }
        Command::Play {
            n,
            strategy,
            type_a_order,
        } => {
            let order = type_a_order.unwrap_or_default();
            let (g, name) = match strategy {
                Strategy::Shortest => (shortest_game(*n)?, "shortest".to_string()),
                Strategy::Longest => (longest_game(*n, order)?, "longest".to_string()),
                Strategy::TypeA => (type_a_game(*n)?, "type-a".to_string()),
                Strategy::Length(m) => (game_of_length(*n, *m)?, format!("length={m}")),
            };
            let params = match strategy {
                Strategy::Longest => json!({ "strategy": name, "type_a_order": order }),
                _ => json!({ "strategy": name }),
            };
            ok(envelope("play", Some(*n), params, game_json(&g)))
        }
        Command::Distribution { n, measure, csv } => {
            let d = length_distribution(*n, *measure, limits)?;
            if let Some(path) = csv {
                write_file(path, &d.to_csv())?;
            }
            ok(envelope(
                "distribution",
                Some(*n),
                json!({ "measure": measure, "csv": csv.as_ref().map(|p| p.display().to_string()) }),
                distribution_json(&d),
            ))
        }
        Command::Simulate {
            n,
            measure,
            seed,
            count,
            threads,
            csv,
        } => {
            if *count == 0 {
                bail!("--count must be positive");
            }
            let cfg = SampleConfig {
                measure: *measure,
                seed: *seed,
                count: *count,
                threads: *threads,
            };
            let lengths = sample_lengths(*n, &cfg, limits)?;
            if let Some(path) = csv {
                let mut body = String::from("game,length\n");
                for (i, l) in lengths.iter().enumerate() {
                    body.push_str(&format!("{i},{l}\n"));
                }
                write_file(path, &body)?;
            }
            let s = sample_summary(&lengths);
            let nf = *n as f64;
            ok(envelope(
                "simulate",
                Some(*n),
                json!({ "measure": measure, "seed": seed, "count": count }),
                json!({
                    "summary": stats_json(&s),
                    "mean_over_n": s.mean / nf,
                    "excess_over_n": (s.mean - nf) / nf,
                    "variance_over_n": s.variance / nf,
                    "min_length": lengths.iter().min(),
                    "max_length": lengths.iter().max(),
                }),
            ))
        }
        Command::Odds { n, measure, modulus } => {
            let r = mod_z_distribution(*n, *measure, *modulus, limits)?;
            let mut result = serde_json::to_value(&r)?;
            if *modulus == 2 {
                result["player_one_wins"] = json!(r.player_one_wins());
            }
            ok(envelope(
                "odds",
                Some(*n),
                json!({ "measure": measure, "mod": modulus }),
                result,
            ))
        }
        Command::Partition {
            n,
            scheme,
            measure,
            min_m,
            samples,
            seed,
        } => {
            let mut classes = match samples {
                None => all_classes(*n, *scheme, *measure, limits)?,
                Some(count) => {
                    let cfg = SampleConfig {
                        measure: *measure,
                        seed: *seed,
                        count: *count,
                        threads: 0,
                    };
                    sampled_classes(*n, *scheme, &cfg, limits)?
                }
            };
            classes.retain(|c| c.m >= *min_m);
            let mut records: Vec<(String, Value)> = classes
                .iter()
                .map(|c| (c.representative.to_string(), class_json(c)))
                .collect();
            records.sort_by(|a, b| a.0.cmp(&b.0));
            let mut params = json!({ "scheme": scheme, "measure": measure, "min_m": min_m });
            if let Some(k) = samples {
                params["samples"] = json!(k);
                params["seed"] = json!(seed);
            }
            ok(envelope(
                "partition",
                Some(*n),
                params,
                json!({
                    "classes": records.len(),
                    "records": records.into_iter().map(|r| r.1).collect::<Vec<_>>(),
                }),
            ))
        }
        Command::Verify { suite, max_n } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let report = verify(&suites, *max_n, limits)?;
            Ok(Outcome {
                success: report.passed,
                json: envelope(
                    "verify",
                    *max_n,
                    json!({ "suite": suite, "max_n": max_n }),
                    serde_json::to_value(&report)?,
                ),
            })
        }
    }
}

/// Runs a command and writes its JSON, newline-terminated, to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let outcome = execute(&cli.command, &Limits::from_env())?;
    serde_json::to_writer_pretty(&mut *out, &outcome.json)?;
    writeln!(out)?;
    Ok(outcome.success)
}
