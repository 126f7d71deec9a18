use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};

use web_time::Instant;

use super::{IterationStats, SearchOptions, SearchStats, Solution};
use crate::error::SearchError;
use crate::problem::{Cost, SearchProblem, COST_EPS};

/// Outcome of one cost-bounded depth-first iteration.
#[derive(Clone, Debug)]
pub struct IterationResult<S> {
    pub bound: Cost,
    /// First goal reached within the bound, with its path.
    pub solution: Option<(Cost, Vec<S>)>,
    /// Smallest distinct f-values that exceeded the bound, ascending.
    pub pruned: Vec<Cost>,
    pub expanded: u64,
    pub generated: u64,
    pub cancelled: bool,
}

/// Depth-first search below an f-bound. Cycles are cut by checking the
/// current path; no transposition table is kept.
pub struct DepthFirstIteration<'a, P: SearchProblem> {
    problem: &'a P,
    bound: Cost,
    keep_pruned: usize,
    stop: Option<&'a AtomicBool>,
    path: Vec<P::State>,
    on_path: HashSet<P::State>,
    pruned: Vec<Cost>,
    expanded: u64,
    generated: u64,
    cancelled: bool,
}

impl<'a, P: SearchProblem> DepthFirstIteration<'a, P> {
    pub fn run(
        problem: &'a P,
        bound: Cost,
        keep_pruned: usize,
        stop: Option<&'a AtomicBool>,
    ) -> IterationResult<P::State> {
        let mut it = DepthFirstIteration {
            problem,
            bound,
            keep_pruned: keep_pruned.max(1),
            stop,
            path: Vec::new(),
            on_path: HashSet::new(),
            pruned: Vec::new(),
            expanded: 0,
            generated: 0,
            cancelled: false,
        };
        let root = problem.initial();
        it.on_path.insert(root.clone());
        it.path.push(root);
        let found = it.visit(0.0);
        IterationResult {
            bound,
            solution: found.map(|g| (g, it.path.clone())),
            pruned: it.pruned,
            expanded: it.expanded,
            generated: it.generated,
            cancelled: it.cancelled,
        }
    }

    fn note_pruned(&mut self, f: Cost) {
        let pos = self.pruned.partition_point(|&v| v < f - COST_EPS);
        if self.pruned.get(pos).is_some_and(|&v| (v - f).abs() <= COST_EPS) {
            return;
        }
        if pos < self.keep_pruned {
            self.pruned.insert(pos, f);
            self.pruned.truncate(self.keep_pruned);
        }
    }

    /// Returns the goal's g when found; the goal path is left in `self.path`.
    fn visit(&mut self, g: Cost) -> Option<Cost> {
        let state = self.path.last().unwrap().clone();
        let f = g + self.problem.heuristic(&state);
        if f > self.bound + COST_EPS {
            self.note_pruned(f);
            return None;
        }
        self.expanded += 1;
        if self.expanded.is_multiple_of(1024) && self.stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
            self.cancelled = true;
        }
        if self.cancelled {
            return None;
        }
        if self.problem.is_goal(&state) {
            return Some(g);
        }
        let mut succ = Vec::new();
        self.problem.expand(&state, &mut succ);
        for (next, c) in succ {
            self.generated += 1;
            if self.on_path.contains(&next) {
                continue;
            }
            self.on_path.insert(next.clone());
            self.path.push(next);
            if let Some(found) = self.visit(g + c) {
                return Some(found);
            }
            let next = self.path.pop().unwrap();
            self.on_path.remove(&next);
            if self.cancelled {
                return None;
            }
        }
        None
    }
}

/// Iterative-deepening A*: the first bound is h(s₀); each following bound is
/// the smallest f that exceeded the previous one.
pub fn idastar<P: SearchProblem>(problem: &P, opts: &SearchOptions) -> Result<Solution<P::State>, SearchError> {
    let started = Instant::now();
    let mut stats = SearchStats::default();
    let mut bound = problem.heuristic(&problem.initial());
    let stop = opts.cancel.as_deref();
    loop {
        let r = DepthFirstIteration::run(problem, bound, 1, stop);
        stats.expanded += r.expanded;
        stats.generated += r.generated;
        stats.iterations.push(IterationStats { bound, expanded: r.expanded });
        if r.cancelled {
            return Err(SearchError::Cancelled);
        }
        if let Some((cost, path)) = r.solution {
            stats.wall_time = started.elapsed().as_secs_f64();
            return Ok(Solution { cost, path, stats, expansions: Vec::new() });
        }
        match r.pruned.first() {
            Some(&next) => bound = next,
            None => {
                stats.wall_time = started.elapsed().as_secs_f64();
                return Ok(Solution::unsolvable(stats));
            }
        }
    }
}
