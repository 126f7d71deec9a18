mod bench;
mod iasim;
mod instance;
mod runner;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use parsearch_core::allocation::CostModelKind;
use parsearch_core::hashing::{HashConfig, StrategyKind};
use parsearch_core::serial::{Weight, DEFAULT_NODE_LIMIT};
use parsearch_core::termination::TerminationMode;
use parsearch_core::SearchError;

use instance::{load, parse_cell, with_problem, Domain, Endpoints, Source};
use runner::{run, Algo, RunSpec};

const SOLVE_FIELDS: &str = "\
Run record (JSON, schema_version 1):
  schema_version       record format version
  instance             instance file or generator spec
  algorithm            astar | wastar | ucs | idastar | spastar | hdastar | window | dovetail
  strategy             hdastar distribution strategy, empty otherwise
  workers              worker threads (weights for dovetail)
  cost                 solution cost, or \"inf\" when no goal is reachable
  solved               whether a solution was found
  path_length          states on the returned path, start and goal included
  expanded/generated/reopened   node counters summed over workers
  wall_time            seconds
  seed                 seed of hashing tables, random owners and schedules
  termination          hdastar only: {mode, attempts, rings}
  weight               winning weight (dovetail) or weight used (wastar)
  possibly_suboptimal  set for weighted runs with weight other than 1
  per_worker           per worker: expanded, generated, reopened, duplicates,
                       sent, received (triplets), messages_sent,
                       messages_received, max_open, stored

Exit codes: 0 solved, 1 unsolvable, 2 node or step limit, 3 usage error.";

const BENCH_FIELDS: &str = "\
Suite file (TOML):
  [[instance]]  name, domain (tile|grid|graph|lattice), file or gen, start/goal (grids)
  [sweep]       algos, strategies, workers, termination, weights, batch,
                node_limit, seed, deterministic

A serial A* baseline runs first for every instance. Parallel engines run for
each worker count above 1; the baseline row stands in for p = 1.

CSV columns:
  instance, algo, strategy, p, cost (\"inf\" if unsolvable), expanded,
  SO      expanded / baseline expanded - 1
  CO      triplets sent to another worker / generated
  LB      max / mean expanded per worker
  efficiency_fraction   share of expansions with f < baseline cost
  speedup baseline wall time / run wall time
  wall_time seconds
Wall-time columns vary between runs. With deterministic = true (or
--deterministic) serial and hdastar rows reproduce from the seed; spastar,
window and dovetail keep their costs but their counters depend on timing.";

const IASIM_FIELDS: &str = "\
Output: '#' lines with the analytic bounds (worst b^2/(b-1), average
2b^2/(b^2-1)) and the simulated max and mean ratios, then CSV columns
W_plus, b, model, total_cost, optimal_cost, ratio.
mean_ratio is total IA cost over total optimal cost across all W_plus.";

#[derive(Parser)]
#[command(name = "parsearch", version, about = "Serial and parallel optimal search harness")]
struct Cli {
    /// Seed for instance generators, hash tables and schedules.
    #[arg(long, global = true, env = "PARSEARCH_SEED", default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print its run record.
    #[command(after_help = SOLVE_FIELDS)]
    Solve(SolveArgs),
    /// Run a benchmark suite and write one CSV row per run.
    #[command(after_help = BENCH_FIELDS)]
    Bench(BenchArgs),
    /// Simulate iterative allocation over a range of minimal widths.
    #[command(after_help = IASIM_FIELDS)]
    Iasim(IasimArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["instance", "gen"])))]
struct SolveArgs {
    #[arg(long, value_enum)]
    domain: Domain,
    /// Instance file.
    #[arg(long)]
    instance: Option<String>,
    /// Generator spec: tile "n=3,seed=7[,walk=40]", grid "w=16,h=16,density=0.2,conn=8,seed=1",
    /// graph "nodes=30,edges=90,seed=1", lattice "dims=3,len=6,seed=1".
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, value_enum, default_value_t = Algo::Astar)]
    algo: Algo,
    /// Distribution strategy for hdastar.
    #[arg(long = "hash", value_parser = parse_strategy, default_value = "zobrist")]
    hash: StrategyKind,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Triplets per message (default 10 below 16 workers, 100 otherwise).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    batch: Option<u64>,
    /// Comma-separated weights for wastar (first) and dovetail, e.g. "1,1.5,2,3,inf".
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    weights: Vec<Weight>,
    #[arg(long, value_parser = parse_termination, default_value = "two-wave")]
    termination: TerminationMode,
    /// Stored nodes allowed (per worker for hdastar).
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: usize,
    /// TOML file overriding hashing parameters.
    #[arg(long)]
    hash_config: Option<PathBuf>,
    /// Grid start cell "x,y" (default top-left).
    #[arg(long, value_parser = parse_cell)]
    start: Option<parsearch_core::domains::Cell>,
    /// Grid goal cell "x,y" (default bottom-right).
    #[arg(long, value_parser = parse_cell)]
    goal: Option<parsearch_core::domains::Cell>,
    /// Run hdastar under the seeded single-threaded interleaver.
    #[arg(long)]
    deterministic: bool,
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite file (TOML).
    suite: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: usize,
    #[arg(long)]
    hash_config: Option<PathBuf>,
    /// Run hdastar under the seeded single-threaded interleaver.
    #[arg(long)]
    deterministic: bool,
    /// CSV output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IasimArgs {
    /// Growth factor of the geometric strategy.
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    /// Largest minimal width simulated.
    #[arg(long, default_value_t = 1024)]
    wmax: u64,
    /// Hours a failing iteration runs.
    #[arg(long, default_value_t = 1.0)]
    e: f64,
    #[arg(long, value_parser = parse_model, default_value = "discrete")]
    model: CostModelKind,
    /// Bill every iteration on its own instead of sharing started hours.
    #[arg(long)]
    no_spare_reuse: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse().map_err(|e: parsearch_core::hashing::HashError| e.to_string())
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    s.parse()
}

fn parse_termination(s: &str) -> Result<TerminationMode, String> {
    s.parse()
}

fn parse_model(s: &str) -> Result<CostModelKind, String> {
    s.parse()
}

pub enum Failure {
    Usage(anyhow::Error),
    Resource(anyhow::Error),
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        if e.is_resource_limit() {
            Failure::Resource(e.into())
        } else {
            Failure::Usage(e.into())
        }
    }
}

fn hash_config(path: Option<&PathBuf>, seed: u64) -> Result<HashConfig, Failure> {
    let Some(path) = path else {
        return Ok(HashConfig { seed, ..Default::default() });
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))
        .map_err(Failure::Usage)?;
    let mut cfg = HashConfig::from_toml(&text).map_err(|e| Failure::Usage(e.into()))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Failure::Usage(e.into()))?;
    if !table.contains_key("seed") {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create `{}`", p.display())).map_err(Failure::Usage)?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(args: SolveArgs, seed: u64) -> Result<u8, Failure> {
    let hash = hash_config(args.hash_config.as_ref(), seed)?;
    let (source, label) = match (&args.instance, &args.gen) {
        (Some(f), _) => (Source::File(f.clone()), f.clone()),
        (None, Some(g)) => (Source::Gen(g.clone()), format!("{}:{g}", args.domain)),
        (None, None) => return Err(Failure::Usage(anyhow!("--instance or --gen is required"))),
    };
    let ends = Endpoints { start: args.start, goal: args.goal };
    let inst = load(args.domain, &source, &ends, &hash, seed).map_err(Failure::Usage)?;
    let spec = RunSpec {
        algo: args.algo,
        strategy: args.hash,
        workers: args.workers as usize,
        batch: args.batch.map(|b| b as usize),
        weights: args.weights,
        termination: args.termination,
        node_limit: args.node_limit,
        seed,
        hash,
        deterministic: args.deterministic,
    };
    let result = with_problem!(&inst, p => run(p, &label, &spec, None, false))?;
    let rec = &result.record;
    eprintln!(
        "{} on {}: cost {} expanded {} generated {} in {:.3}s",
        rec.algorithm,
        label,
        if rec.solved { rec.cost.to_string() } else { "inf".into() },
        rec.expanded,
        rec.generated,
        rec.wall_time
    );
    let mut out = output(args.out.as_ref())?;
    let io = |e: io::Error| Failure::Usage(e.into());
    serde_json::to_writer_pretty(&mut out, rec).map_err(|e| Failure::Usage(e.into()))?;
    writeln!(out).map_err(io)?;
    out.flush().map_err(io)?;
    Ok(if rec.solved { 0 } else { 1 })
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Command::Solve(args) => solve(args, cli.seed),
        Command::Bench(args) => {
            let opts = bench::BenchOptions {
                seed: cli.seed,
                node_limit: args.node_limit,
                deterministic: args.deterministic,
                hash: hash_config(args.hash_config.as_ref(), cli.seed)?,
            };
            // Validate the suite before creating the output file.
            bench::load_suite(&args.suite)?;
            let mut out = output(args.out.as_ref())?;
            bench::bench(&args.suite, &opts, &mut out)?;
            Ok(0)
        }
        Command::Iasim(args) => {
            let opts = iasim::IaOptions {
                b: args.b,
                w_max: args.wmax,
                e: args.e,
                model: args.model,
                spare_reuse: !args.no_spare_reuse,
            };
            let mut out = output(args.out.as_ref())?;
            iasim::iasim(&opts, &mut out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Resource(e)) => {
            eprintln!("resource limit: {e:#}");
            ExitCode::from(2)
        }
    }
}
