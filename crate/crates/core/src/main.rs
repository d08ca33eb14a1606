use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::Serialize;

use privgraph::analytics::{
    commute_times_exact, cover_time_bounds, hitting_times_all_exact, private_commute_times, private_hitting_times,
    private_resistances, resistance_matrix, GapCheck, HittingVector, PairMap,
};
use privgraph::cut::{cut_release, CutMeta};
use privgraph::dp::BudgetLedger;
use privgraph::graph::{slot_count, EdgeId};
use privgraph::harness::experiment::{run_suite, EvalSuite};
use privgraph::harness::io::{format_graph, load_graph, load_graph_with, save_graph, Weights};
use privgraph::harness::oracle::brute_force_max_cut_error;
use privgraph::harness::stats::sampler_distribution_test;
use privgraph::mirror::MirrorDescentConfig;
use privgraph::sampler::BernoulliProfile;
use privgraph::spectral::{spectral_release, SpectralMeta};
use privgraph::topology::topology_sample;
use privgraph::{Error, ReleaseRng};

/// Differentially private synthetic graphs and random-walk statistics.
#[derive(Parser)]
#[command(name = "privgraph", version)]
struct Cli {
    /// Root RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for experiment trials.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Experiment suite file (TOML) for `eval`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pure-DP release approximating the Laplacian spectrum.
    Spectral(SpectralArgs),
    /// Approximate-DP release approximating all (S,T) cuts.
    Cut(CutArgs),
    /// Effective resistance, commute, cover and hitting times.
    Analytics(AnalyticsArgs),
    /// Raw topology sampler draws.
    Sample(SampleArgs),
    /// Run an experiment suite and check its thresholds.
    Eval(EvalArgs),
    /// Brute-force utilities.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct CutArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    /// Defaults to 1/(ln n)^{1/4}.
    #[arg(long)]
    beta: Option<f64>,
    /// Mirror descent rounds; defaults to ⌈n ln n⌉.
    #[arg(long)]
    md_iters: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stat {
    Resistance,
    Commute,
    Cover,
    Hitting,
}

#[derive(Args)]
struct AnalyticsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    stat: Stat,
    #[arg(long, required_unless_present = "exact")]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long, conflicts_with = "exact")]
    private: bool,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    draws: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Suite file; overrides `--config`.
    suite: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact max |Φ_A − Φ_B| over disjoint (S,T), n ≤ 13.
    MaxCut {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Sampler goodness of fit against exact enumeration.
    SamplerTest {
        /// Comma-separated coin probabilities.
        #[arg(long, value_delimiter = ',')]
        probabilities: Vec<f64>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200_000)]
        draws: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> privgraph::Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> privgraph::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn warn_gap(gap: &GapCheck) {
    if !gap.satisfied {
        eprintln!(
            "warning: Δ·ln²n/(ελ) = {:.3} ≥ 1/2 (λ = {:.4}, Δ = {}); accuracy guarantee does not apply",
            gap.ratio, gap.spectral_gap, gap.max_degree
        );
    }
}

fn run(cli: Cli) -> privgraph::Result<bool> {
    match cli.command {
        Command::Spectral(a) => {
            let g = load_graph(&a.input)?;
            let start = Instant::now();
            let r = spectral_release(&g, a.epsilon, a.beta, cli.seed)?;
            let wall = start.elapsed().as_secs_f64();
            match &a.output {
                Some(p) => save_graph(&r.graph, p)?,
                None => write_out(None, &format_graph(&r.graph))?,
            }
            if let Some(p) = &a.meta {
                let meta = SpectralMeta {
                    mechanism: "spectral",
                    n: g.n(),
                    m: g.nnz(),
                    m_hat: r.m_hat,
                    epsilon: a.epsilon,
                    beta: a.beta,
                    seed: r.seed,
                    budget: r.budget(),
                    ledger: r.ledger.clone(),
                    wall_time_secs: wall,
                };
                write_json(p, &meta)?;
            }
            Ok(true)
        }
        Command::Cut(a) => {
            let g = load_graph(&a.input)?;
            let config = MirrorDescentConfig {
                iterations: a.md_iters,
                ..Default::default()
            };
            let start = Instant::now();
            let r = cut_release(&g, a.epsilon, a.delta, a.beta, &config, cli.seed)?;
            let wall = start.elapsed().as_secs_f64();
            match &a.output {
                Some(p) => save_graph(&r.graph, p)?,
                None => write_out(None, &format_graph(&r.graph))?,
            }
            if let Some(p) = &a.meta {
                let meta = CutMeta {
                    mechanism: "cut",
                    n: g.n(),
                    m: g.nnz(),
                    m_hat: r.m_hat,
                    epsilon: a.epsilon,
                    delta: a.delta,
                    beta: r.beta,
                    seed: r.seed,
                    heavy_slots: r.heavy_part.stored_slots(),
                    light_slots: r.light_part.stored_slots(),
                    residual_edges: r.residual_edges,
                    residual_max_weight: r.residual_max_weight,
                    mirror_descent: r.plan.clone(),
                    budget: r.budget(),
                    ledger: r.ledger.clone(),
                    wall_time_secs: wall,
                };
                write_json(p, &meta)?;
            }
            Ok(true)
        }
        Command::Analytics(a) => {
            let g = load_graph(&a.input)?;
            let mut rng = ReleaseRng::seed_from_u64(cli.seed);
            let private = !a.exact;
            let epsilon = || {
                a.epsilon
                    .ok_or_else(|| Error::Config("--epsilon is required for private statistics".into()))
            };
            let mut ledger: Option<BudgetLedger> = None;
            let text = match a.stat {
                Stat::Resistance | Stat::Commute | Stat::Cover => {
                    let values: PairMap = match (a.stat, private) {
                        (Stat::Resistance, false) => {
                            let r = resistance_matrix(&g)?;
                            pair_map(g.n(), |u, v| r[(u, v)])
                        }
                        (Stat::Resistance, true) => {
                            let r = private_resistances(&g, epsilon()?, a.beta, &mut rng)?;
                            warn_gap(&r.gap);
                            ledger = Some(r.ledger);
                            r.values
                        }
                        (_, false) => commute_times_exact(&g)?,
                        (_, true) => {
                            let r = private_commute_times(&g, epsilon()?, a.beta, &mut rng)?;
                            warn_gap(&r.gap);
                            if r.release.repaired {
                                eprintln!("note: released graph was disconnected; overlaid K_n at weight 1/n");
                            }
                            ledger = Some(r.ledger);
                            r.values
                        }
                    };
                    if matches!(a.stat, Stat::Cover) {
                        let (lo, hi) = cover_time_bounds(&values)?;
                        format!("bound,value\nlower,{lo:.16e}\nupper,{hi:.16e}\n")
                    } else {
                        let mut s = String::from("u,v,value\n");
                        for ((u, v), x) in &values {
                            s.push_str(&format!("{u},{v},{x:.16e}\n"));
                        }
                        s
                    }
                }
                Stat::Hitting => {
                    let vectors: Vec<HittingVector> = if private {
                        let r = private_hitting_times(&g, epsilon()?, a.beta, &mut rng)?;
                        warn_gap(&r.gap);
                        ledger = Some(r.ledger);
                        r.vectors
                    } else {
                        hitting_times_all_exact(&g)?
                    };
                    let mut s = String::from("t,u,value\n");
                    for h in &vectors {
                        for (u, x) in h.values.iter().enumerate() {
                            s.push_str(&format!("{},{u},{x:.16e}\n", h.target));
                        }
                    }
                    s
                }
            };
            if let Some(l) = ledger {
                eprintln!("privacy spent: {}", l.total());
            }
            write_out(a.output.as_deref(), &text)?;
            Ok(true)
        }
        Command::Sample(a) => {
            let g = load_graph(&a.input)?;
            let mut rng = ReleaseRng::seed_from_u64(cli.seed);
            let mut ledger = BudgetLedger::new();
            let mut s = String::new();
            for _ in 0..a.draws {
                let picked = topology_sample(&g, a.k, a.epsilon, &mut ledger, &mut rng)?;
                let line: Vec<String> = picked.iter().map(|e: &EdgeId| e.0.to_string()).collect();
                s.push_str(&line.join(" "));
                s.push('\n');
            }
            eprintln!(
                "{} draws of {} slots out of {}; privacy spent {}",
                a.draws,
                a.k,
                slot_count(g.n()),
                ledger.total()
            );
            write_out(a.output.as_deref(), &s)?;
            Ok(true)
        }
        Command::Eval(a) => {
            let path = a
                .suite
                .or(cli.config)
                .ok_or_else(|| Error::Config("eval needs a suite file (positional or --config)".into()))?;
            let suite = EvalSuite::from_toml(&fs::read_to_string(&path)?)?;
            let report = run_suite(&suite, cli.threads.max(1))?;
            for r in &report.experiments {
                for t in &r.thresholds {
                    eprintln!(
                        "{} {}: {:?} {:?} = {:.6} [{}]",
                        if t.passed { "PASS" } else { "FAIL" },
                        r.config.name,
                        t.threshold.metric,
                        t.threshold.statistic,
                        t.value,
                        bounds(t.threshold.at_least, t.threshold.at_most)
                    );
                }
            }
            for c in &report.comparisons {
                eprintln!(
                    "{} {}: ratio {:.4} [{}]",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.comparison.name,
                    c.ratio,
                    bounds(c.comparison.at_least, c.comparison.at_most)
                );
            }
            let json = serde_json::to_string_pretty(&report)? + "\n";
            write_out(a.output.as_deref(), &json)?;
            Ok(report.passed)
        }
        Command::Oracle(OracleCommand::MaxCut { a, b }) => {
            let ga = load_graph_with(&a, Weights::Signed)?;
            let gb = load_graph_with(&b, Weights::Signed)?;
            let (err, q) = brute_force_max_cut_error(&ga, &gb)?;
            println!("{}", serde_json::json!({ "error": err, "s": q.s, "t": q.t }));
            Ok(true)
        }
        Command::Oracle(OracleCommand::SamplerTest { probabilities, k, draws }) => {
            let profile = BernoulliProfile::from_probabilities(&probabilities)?;
            let mut rng = ReleaseRng::seed_from_u64(cli.seed);
            let t = sampler_distribution_test(&profile, k, draws, &mut rng)?;
            println!("{}", serde_json::to_string(&t)?);
            Ok(true)
        }
    }
}

fn bounds(lo: Option<f64>, hi: Option<f64>) -> String {
    match (lo, hi) {
        (Some(l), Some(h)) => format!("{l} ≤ x ≤ {h}"),
        (Some(l), None) => format!("x ≥ {l}"),
        (None, Some(h)) => format!("x ≤ {h}"),
        (None, None) => "unbounded".into(),
    }
}

fn pair_map(n: usize, f: impl Fn(usize, usize) -> f64) -> PairMap {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).map(|(u, v)| ((u, v), f(u, v))).collect()
}
