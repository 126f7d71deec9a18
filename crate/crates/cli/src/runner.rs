use std::fmt;

use parsearch_core::hashing::{Distributor, HashConfig, StrategyKind};
use parsearch_core::metrics::efficiency_fraction;
use parsearch_core::parallel::{
    dovetail, hdastar, DEFAULT_WEIGHTS, hdastar_interleaved, parallel_window, spastar, EngineConfig, ParallelOutcome,
    SchedulePolicy, WorkerStats,
};
use parsearch_core::problem::validate_path;
use parsearch_core::record::RunRecord;
use parsearch_core::serial::{astar, idastar, uniform_cost, wastar, Expansion, Weight};
use parsearch_core::termination::TerminationMode;
use parsearch_core::{Cost, SearchError, SearchOptions, SearchProblem, SearchStats, Solution};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Astar,
    Wastar,
    Ucs,
    Idastar,
    Spastar,
    Hdastar,
    Window,
    Dovetail,
}

impl Algo {
    pub fn token(self) -> &'static str {
        match self {
            Algo::Astar => "astar",
            Algo::Wastar => "wastar",
            Algo::Ucs => "ucs",
            Algo::Idastar => "idastar",
            Algo::Spastar => "spastar",
            Algo::Hdastar => "hdastar",
            Algo::Window => "window",
            Algo::Dovetail => "dovetail",
        }
    }

    /// Engines whose worker count is a sweep dimension.
    pub fn takes_workers(self) -> bool {
        matches!(self, Algo::Spastar | Algo::Hdastar | Algo::Window)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub algo: Algo,
    pub strategy: StrategyKind,
    pub workers: usize,
    pub batch: Option<usize>,
    pub weights: Vec<Weight>,
    pub termination: TerminationMode,
    pub node_limit: usize,
    pub seed: u64,
    pub hash: HashConfig,
    /// Drive HDA* with the seeded single-threaded interleaver.
    pub deterministic: bool,
}

pub struct Run {
    pub record: RunRecord,
    pub stats: SearchStats,
    pub workers: Vec<WorkerStats>,
    pub efficiency: Option<f64>,
}

fn single(stats: &SearchStats) -> Vec<WorkerStats> {
    vec![WorkerStats {
        expanded: stats.expanded,
        generated: stats.generated,
        reopened: stats.reopened,
        duplicates: stats.duplicates,
        max_open: stats.max_open,
        ..Default::default()
    }]
}

/// Runs one algorithm. `c_star` is the cost the efficiency fraction is
/// measured against; without it the run's own cost is used.
pub fn run<P: SearchProblem>(
    problem: &P,
    instance: &str,
    spec: &RunSpec,
    c_star: Option<Cost>,
    record_expansions: bool,
) -> Result<Run, SearchError> {
    let opts = SearchOptions { node_limit: spec.node_limit, record_expansions, cancel: None };
    let cfg = EngineConfig {
        workers: spec.workers,
        strategy: spec.strategy,
        hash: spec.hash.clone(),
        batch: spec.batch,
        seed: spec.seed,
        node_limit: spec.node_limit,
        termination: spec.termination,
        record_expansions,
        ..Default::default()
    };
    let from_parallel = |out: ParallelOutcome<P::State>| (out.solution, out.workers, Some(out.termination));

    let mut weight = None;
    let mut possibly_suboptimal = false;
    let (solution, workers, termination): (Solution<P::State>, _, _) = match spec.algo {
        Algo::Astar => {
            let s = astar(problem, &opts)?;
            let w = single(&s.stats);
            (s, w, None)
        }
        Algo::Ucs => {
            let s = uniform_cost(problem, &opts)?;
            let w = single(&s.stats);
            (s, w, None)
        }
        Algo::Wastar => {
            let w = *spec.weights.first().unwrap_or(&Weight::ONE);
            let s = wastar(problem, w, &opts)?;
            weight = Some(w.to_string());
            possibly_suboptimal = !w.is_one();
            let ws = single(&s.stats);
            (s, ws, None)
        }
        Algo::Idastar => {
            let s = idastar(problem, &opts)?;
            let w = single(&s.stats);
            (s, w, None)
        }
        Algo::Spastar => {
            let (s, w, _) = from_parallel(spastar(problem, &cfg)?);
            (s, w, None)
        }
        Algo::Window => {
            let (s, w, _) = from_parallel(parallel_window(problem, &cfg)?);
            (s, w, None)
        }
        Algo::Hdastar if spec.deterministic => {
            let dist = Distributor::new(problem, spec.strategy, &spec.hash)
                .map_err(|e| SearchError::config(e.to_string()))?;
            let (out, _) = hdastar_interleaved(problem, &dist, &cfg, SchedulePolicy::Random { seed: spec.seed })?;
            from_parallel(out)
        }
        Algo::Hdastar => from_parallel(hdastar(problem, &cfg)?),
        Algo::Dovetail => {
            let weights = if spec.weights.is_empty() { DEFAULT_WEIGHTS.to_vec() } else { spec.weights.clone() };
            let out = dovetail(problem, &weights, &opts)?;
            weight = Some(out.weight.to_string());
            possibly_suboptimal = out.possibly_suboptimal;
            let w = single(&out.solution.stats);
            (out.solution, w, None)
        }
    };

    if solution.is_solved() {
        let walked = validate_path(problem, &solution.path).map_err(SearchError::InvalidPath)?;
        if (walked - solution.cost).abs() > 1e-6 * solution.cost.abs().max(1.0) {
            return Err(SearchError::InvalidPath(format!("path costs {walked}, reported {}", solution.cost)));
        }
    }
    let efficiency = fraction(&solution.expansions, c_star.unwrap_or(solution.cost));

    let mut record = RunRecord::new(instance, spec.algo.token(), solution.cost, &solution.stats);
    if spec.algo == Algo::Hdastar {
        record.strategy = spec.strategy.token().to_string();
    }
    record.workers = match spec.algo {
        a if a.takes_workers() => spec.workers,
        Algo::Dovetail if spec.weights.is_empty() => DEFAULT_WEIGHTS.len(),
        Algo::Dovetail => spec.weights.len(),
        _ => 1,
    };
    record.path_length = solution.path.len();
    record.seed = spec.seed;
    record.termination = if spec.algo == Algo::Hdastar { termination } else { None };
    record.weight = weight;
    record.possibly_suboptimal = possibly_suboptimal;
    record.per_worker = workers.clone();
    Ok(Run { record, stats: solution.stats, workers, efficiency })
}

fn fraction<S>(expansions: &[Expansion<S>], c_star: Cost) -> Option<f64> {
    if c_star.is_finite() {
        efficiency_fraction(expansions, c_star).ok()
    } else {
        None
    }
}
