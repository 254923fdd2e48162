//! `collab-walk`: batch front end for collaborative random-walk exploration.

mod commands;
mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "collab-walk", version, about = "Union of ranges of independent random walks")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated graph as an edge list.
    Gen(GenArgs),
    /// Exact expected union size.
    Exact(JobArgs),
    /// Monte Carlo expected union size.
    Simulate(SimulateArgs),
    /// Run a verification suite or a single inequality check.
    Verify(VerifyArgs),
    /// Gap between k walkers and one walker as the lifespan scale grows.
    GapDecay(GapDecayArgs),
    /// Three walkers from the torus origin against one walker.
    Torus(TorusArgs),
    /// Empirical CDFs of the union size against a single walk.
    Dominance(DominanceArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GenSource {
    #[arg(long, value_name = "N")]
    cycle: Option<usize>,
    #[arg(long, value_name = "N")]
    complete: Option<usize>,
    #[arg(long, value_name = "N")]
    path: Option<usize>,
    /// Dimension and side, e.g. `3,5`.
    #[arg(long, value_name = "D,N")]
    torus: Option<String>,
    /// Vertices, edge probability and seed, e.g. `30,0.2,7`.
    #[arg(long, value_name = "N,P,SEED")]
    gnp: Option<String>,
    /// Any generator spec or edge-list path.
    #[arg(long, value_name = "SPEC")]
    graph: Option<String>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    source: GenSource,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct JobArgs {
    /// Generator spec (`cycle:3`, `torus:2,3`, `gnp:30,0.2,7`, …) or edge-list path.
    #[arg(long)]
    graph: String,
    /// `plain`, `lazy` or `continuous`.
    #[arg(long, default_value = "plain")]
    variant: String,
    /// `iid-stationary`, `iid-uniform`, `shared-stationary`, `shared-uniform`,
    /// `point:<v>[,<v>…]` or `dist:<path>`.
    #[arg(long, default_value = "iid-stationary")]
    scheme: String,
    /// Number of walkers; defaults to the number of lifespans.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated lifespans; one value is used for every walker.
    #[arg(long)]
    t: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    job: JobArgs,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `small` or `odd-scan`.
    #[arg(long, conflicts_with = "graph")]
    suite: Option<String>,
    /// Variants for `--suite small`: `lazy`, `continuous`, `plain` or `all`.
    #[arg(long, default_value = "all")]
    case: String,
    /// Single check on one graph instead of a suite.
    #[arg(long)]
    graph: Option<String>,
    /// `one-vs-many` or `star-vs-iid` for single checks.
    #[arg(long, default_value = "one-vs-many")]
    inequality: String,
    #[arg(long, default_value = "plain")]
    variant: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    t: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GapDecayArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Comma-separated scale factors `c`; each walker lives `⌈c n²⌉` steps.
    #[arg(long, default_value = "0.0005,0.001,0.0015,0.002,0.003,0.004,0.005,0.006,0.008,0.01")]
    c: String,
    #[arg(long, default_value_t = 1000)]
    replicas: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed of the graph sample; defaults to `--seed`.
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long, default_value = "plain")]
    variant: String,
    /// `auto`, `exact` or `mc`.
    #[arg(long, default_value = "mc")]
    method: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TorusArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    side: usize,
    /// First lifespan; defaults to `⌈c0 n² ln n⌉`.
    #[arg(long)]
    t1: Option<u64>,
    /// Second lifespan; defaults to `n²`.
    #[arg(long)]
    t2: Option<u64>,
    /// Third lifespan; defaults to `n²`.
    #[arg(long)]
    t3: Option<u64>,
    #[arg(long, default_value_t = 10.0)]
    c0: f64,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "lazy")]
    variant: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DominanceArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, default_value = "plain")]
    variant: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    t: String,
    #[arg(long, default_value_t = 10_000)]
    replicas: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `auto`, `exact` or `mc`; exact uses trajectory enumeration.
    #[arg(long, default_value = "mc")]
    method: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("usage error"));
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if commands::is_verify_failure(&e).is_some() => {
            eprintln!("verification failed: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
