use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;

use parking_lot::{Condvar, Mutex};
use web_time::Instant;

use super::{EngineConfig, ParallelOutcome, TerminationReport, WorkerStats};
use crate::problem::{Cost, SearchProblem, COST_EPS};
use crate::serial::{DepthFirstIteration, IterationResult, IterationStats, Solution};
use crate::SearchError;

/// Hands out IDA* bounds and decides when the best solution is proven
/// optimal.
///
/// Every finished iteration that found no goal proves C* ≥ its smallest
/// pruned f, so `lower` is the largest such value. A solution of cost c is
/// optimal once c ≤ `lower`. Bounds are drawn from the pruned f-values the
/// iterations report, smallest unclaimed first, skipping values below
/// `lower` (already refuted) and values at or above the best cost (cannot
/// improve it).
struct Dispenser<S> {
    candidates: Vec<Cost>,
    claimed: Vec<Cost>,
    lower: Cost,
    best: Option<(Cost, Vec<S>)>,
    running: usize,
    done: bool,
    iterations: Vec<IterationStats>,
}

impl<S> Dispenser<S> {
    fn best_cost(&self) -> Cost {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.0)
    }

    fn proven(&self) -> bool {
        self.best_cost() <= self.lower + COST_EPS
    }

    fn claim(&mut self) -> Option<Cost> {
        let (lo, hi) = (self.lower - COST_EPS, self.best_cost() - COST_EPS);
        let v = self
            .candidates
            .iter()
            .copied()
            .filter(|&v| v >= lo && v < hi)
            .filter(|&v| !self.claimed.iter().any(|&c| (c - v).abs() <= COST_EPS))
            .min_by(|a, b| a.total_cmp(b))?;
        self.claimed.push(v);
        self.running += 1;
        Some(v)
    }

    fn report(&mut self, r: IterationResult<S>) {
        self.running -= 1;
        if r.cancelled {
            return;
        }
        self.iterations.push(IterationStats { bound: r.bound, expanded: r.expanded });
        match r.solution {
            Some((c, path)) => {
                if c < self.best_cost() {
                    self.best = Some((c, path));
                }
            }
            None => {
                // No pruned node means the whole reachable space fit the bound.
                let next = r.pruned.first().copied().unwrap_or(f64::INFINITY);
                self.lower = self.lower.max(next);
                self.candidates.extend(r.pruned);
            }
        }
    }
}

/// Parallel window IDA*: each worker runs a whole IDA* iteration with its
/// own bound. A solution is returned only after every smaller bound has been
/// refuted.
///
/// Only `workers` and `record_expansions` of `cfg` apply; expansions are not
/// recorded by depth-first iterations.
pub fn parallel_window<P: SearchProblem>(
    problem: &P,
    cfg: &EngineConfig,
) -> Result<ParallelOutcome<P::State>, SearchError> {
    cfg.validate()?;
    let started = Instant::now();
    let h0 = problem.heuristic(&problem.initial());
    let keep = cfg.workers.max(4) * 2;
    let shared = Mutex::new(Dispenser {
        candidates: vec![h0],
        claimed: Vec::new(),
        lower: h0,
        best: None,
        running: 0,
        done: false,
        iterations: Vec::new(),
    });
    let wake = Condvar::new();
    let stop = AtomicBool::new(false);

    let stats: Vec<WorkerStats> = thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.workers)
            .map(|_| {
                let (shared, wake, stop) = (&shared, &wake, &stop);
                scope.spawn(move || {
                    let mut stats = WorkerStats::default();
                    loop {
                        let bound = {
                            let mut d = shared.lock();
                            loop {
                                if d.done {
                                    return stats;
                                }
                                if d.proven() {
                                    d.done = true;
                                } else if let Some(b) = d.claim() {
                                    break b;
                                } else if d.running == 0 {
                                    // Nothing left below the incumbent.
                                    d.done = true;
                                }
                                if d.done {
                                    stop.store(true, Ordering::Relaxed);
                                    wake.notify_all();
                                    return stats;
                                }
                                wake.wait(&mut d);
                            }
                        };
                        let r = DepthFirstIteration::run(problem, bound, keep, Some(stop));
                        stats.expanded += r.expanded;
                        stats.generated += r.generated;
                        shared.lock().report(r);
                        wake.notify_all();
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let d = shared.into_inner();
    let mut summary = WorkerStats::summed(&stats);
    summary.wall_time = started.elapsed().as_secs_f64();
    summary.iterations = d.iterations;
    let solution = match d.best {
        Some((cost, path)) => Solution { cost, path, stats: summary, expansions: Vec::new() },
        None => Solution::unsolvable(summary),
    };
    Ok(ParallelOutcome { solution, workers: stats, termination: TerminationReport::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{ExplicitGraph, TilePuzzle, TileState};
    use crate::hashing::StrategyKind;
    use crate::serial::{idastar, SearchOptions};

    fn cfg(p: usize) -> EngineConfig {
        EngineConfig::new(p, StrategyKind::Zobrist)
    }

    #[test]
    fn single_worker_follows_idastar_bounds() {
        let pz = TilePuzzle::new(TileState::random_solvable(3, 4));
        let serial = idastar(&pz, &SearchOptions::default()).unwrap();
        let par = parallel_window(&pz, &cfg(1)).unwrap();
        assert_eq!(par.solution.cost, serial.cost);
        let bounds = |s: &crate::serial::SearchStats| s.iterations.iter().map(|i| i.bound).collect::<Vec<_>>();
        assert_eq!(bounds(&par.solution.stats), bounds(&serial.stats));
    }

    #[test]
    fn deep_suboptimal_goal_is_not_returned() {
        let mut text = String::from("start s\ngoal g1\ngoal t\ns g1 20\n");
        let mut prev = "s".to_string();
        for i in 0..10 {
            let next = if i == 9 { "t".to_string() } else { format!("c{i}") };
            text.push_str(&format!("{prev} {next} 1\n"));
            prev = next;
        }
        let g = ExplicitGraph::parse(&text).unwrap();
        for p in [1, 2, 4, 8] {
            let out = parallel_window(&g, &cfg(p)).unwrap();
            assert_eq!(out.solution.cost, 10.0, "p = {p}");
            assert_eq!(crate::problem::validate_path(&g, &out.solution.path), Ok(10.0));
        }
    }

    #[test]
    fn exhausted_space_is_unsolvable() {
        let g = ExplicitGraph::parse("start a\ngoal z\nnode z\na b 1\nb c 2\nc a 1\n").unwrap();
        for p in [1, 3] {
            assert!(parallel_window(&g, &cfg(p)).unwrap().solution.cost.is_infinite());
        }
    }
}
