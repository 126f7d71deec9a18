//! Benchmark sweeps: every instance of a suite file against a grid of
//! algorithms, strategies and worker counts, one CSV row per run.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use parsearch_core::hashing::StrategyKind;
use parsearch_core::metrics::overheads;
use parsearch_core::record::serialize_cost;
use parsearch_core::serial::Weight;
use parsearch_core::termination::TerminationMode;
use parsearch_core::Cost;
use serde::{Deserialize, Serialize};

use crate::instance::{load, parse_cell, with_problem, Domain, Endpoints, Instance, Source};
use crate::runner::{run, Algo, Run, RunSpec};
use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default, rename = "instance")]
    pub instances: Vec<SuiteInstance>,
    #[serde(default)]
    pub sweep: Sweep,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteInstance {
    pub name: Option<String>,
    pub domain: Domain,
    /// Instance file, relative to the suite file.
    pub file: Option<String>,
    /// Generator spec, e.g. `n=3,seed=7`.
    pub gen: Option<String>,
    pub start: Option<String>,
    pub goal: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub algos: Vec<Algo>,
    pub strategies: Vec<String>,
    pub workers: Vec<usize>,
    pub termination: String,
    pub weights: Vec<String>,
    pub batch: Option<usize>,
    pub node_limit: Option<usize>,
    pub seed: Option<u64>,
    pub deterministic: bool,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            algos: vec![Algo::Astar, Algo::Hdastar],
            strategies: vec!["zobrist".into()],
            workers: vec![1, 2, 4],
            termination: "two-wave".into(),
            weights: Vec::new(),
            batch: None,
            node_limit: None,
            seed: None,
            deterministic: false,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub instance: String,
    pub algo: String,
    pub strategy: String,
    pub p: usize,
    #[serde(serialize_with = "serialize_cost")]
    pub cost: Cost,
    pub expanded: u64,
    #[serde(rename = "SO")]
    pub so: Option<f64>,
    #[serde(rename = "CO")]
    pub co: Option<f64>,
    #[serde(rename = "LB")]
    pub lb: Option<f64>,
    pub efficiency_fraction: Option<f64>,
    pub speedup: Option<f64>,
    pub wall_time: f64,
}

pub struct BenchOptions {
    pub seed: u64,
    pub node_limit: usize,
    pub deterministic: bool,
    pub hash: parsearch_core::hashing::HashConfig,
}

fn row(name: &str, baseline: &Run, r: &Run, strategy: &str) -> Row {
    let report = overheads(&baseline.stats, &r.workers, r.stats.wall_time).ok();
    Row {
        instance: name.to_string(),
        algo: r.record.algorithm.clone(),
        strategy: strategy.to_string(),
        p: r.record.workers,
        cost: r.record.cost,
        expanded: r.stats.expanded,
        so: report.as_ref().map(|o| o.so),
        co: report.as_ref().map(|o| o.co),
        lb: report.as_ref().map(|o| o.lb),
        efficiency_fraction: r.efficiency,
        speedup: report.as_ref().map(|o| o.speedup).filter(|s| s.is_finite()),
        wall_time: r.stats.wall_time,
    }
}

pub fn load_suite(path: &Path) -> Result<Suite, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read suite `{}`", path.display()))
        .map_err(Failure::Usage)?;
    let suite: Suite = toml::from_str(&text)
        .with_context(|| format!("invalid suite `{}`", path.display()))
        .map_err(Failure::Usage)?;
    if suite.instances.is_empty() {
        return Err(Failure::Usage(anyhow::anyhow!("suite `{}` lists no instances", path.display())));
    }
    Ok(suite)
}

pub fn bench(suite_path: &Path, opts: &BenchOptions, out: &mut dyn Write) -> Result<(), Failure> {
    let suite = load_suite(suite_path)?;
    let sw = &suite.sweep;
    let usage = |e: anyhow::Error| Failure::Usage(e);
    let seed = sw.seed.unwrap_or(opts.seed);

    let strategies: Vec<StrategyKind> = sw
        .strategies
        .iter()
        .map(|s| s.parse::<StrategyKind>().map_err(|e| usage(e.into())))
        .collect::<Result<_, _>>()?;
    let termination: TerminationMode =
        sw.termination.parse().map_err(|e: String| usage(anyhow::anyhow!(e)))?;
    let weights: Vec<Weight> = sw
        .weights
        .iter()
        .map(|w| w.parse::<Weight>().map_err(|e| usage(anyhow::anyhow!(e))))
        .collect::<Result<_, _>>()?;
    if sw.workers.contains(&0) {
        return Err(usage(anyhow::anyhow!("worker counts must be at least 1")));
    }
    if sw.algos.contains(&Algo::Hdastar) && strategies.is_empty() {
        return Err(usage(anyhow::anyhow!("hdastar needs at least one strategy")));
    }

    // Parse every instance before running anything.
    let base = suite_path.parent().unwrap_or(Path::new("."));
    let mut loaded: Vec<(String, Instance)> = Vec::new();
    for (i, si) in suite.instances.iter().enumerate() {
        let name = si.name.clone().unwrap_or_else(|| format!("{}-{}", si.domain, i + 1));
        let source = match (&si.file, &si.gen) {
            (Some(f), None) => Source::File(base.join(f).to_string_lossy().into_owned()),
            (None, Some(g)) => Source::Gen(g.clone()),
            _ => return Err(usage(anyhow::anyhow!("instance `{name}` needs exactly one of `file` or `gen`"))),
        };
        let parse = |s: &Option<String>| s.as_deref().map(parse_cell).transpose().map_err(anyhow::Error::msg);
        let ends = Endpoints { start: parse(&si.start).map_err(usage)?, goal: parse(&si.goal).map_err(usage)? };
        let inst = load(si.domain, &source, &ends, &opts.hash, seed)
            .with_context(|| format!("instance `{name}`"))
            .map_err(usage)?;
        loaded.push((name, inst));
    }

    let spec = RunSpec {
        algo: Algo::Astar,
        strategy: StrategyKind::Zobrist,
        workers: 1,
        batch: sw.batch,
        weights,
        termination,
        node_limit: sw.node_limit.unwrap_or(opts.node_limit),
        seed,
        hash: opts.hash.clone(),
        deterministic: sw.deterministic || opts.deterministic,
    };

    let mut csv = csv::Writer::from_writer(out);
    for (name, inst) in &loaded {
        with_problem!(inst, p => {
            let baseline = run(p, name, &spec, None, true).map_err(Failure::from)?;
            let c_star = baseline.record.cost;
            csv.serialize(row(name, &baseline, &baseline, "")).map_err(|e| Failure::Usage(e.into()))?;
            for &algo in &sw.algos {
                let mut plan: Vec<RunSpec> = Vec::new();
                match algo {
                    Algo::Astar => {}
                    Algo::Hdastar => {
                        for &strategy in &strategies {
                            for &w in sw.workers.iter().filter(|&&w| w > 1) {
                                plan.push(RunSpec { algo, strategy, workers: w, ..spec.clone() });
                            }
                        }
                    }
                    a if a.takes_workers() => {
                        for &w in sw.workers.iter().filter(|&&w| w > 1) {
                            plan.push(RunSpec { algo, workers: w, ..spec.clone() });
                        }
                    }
                    _ => plan.push(RunSpec { algo, ..spec.clone() }),
                }
                for s in plan {
                    let r = run(p, name, &s, Some(c_star), true).map_err(Failure::from)?;
                    let strategy = if algo == Algo::Hdastar { s.strategy.token() } else { "" };
                    csv.serialize(row(name, &baseline, &r, strategy)).map_err(|e| Failure::Usage(e.into()))?;
                }
            }
        });
        csv.flush().map_err(|e| Failure::Usage(e.into()))?;
    }
    Ok(())
}
