use std::thread;

use parking_lot::{Condvar, Mutex};
use web_time::Instant;

use super::{EngineConfig, Incumbent, ParallelOutcome, TerminationReport, WorkerStats};
use crate::problem::{Cost, SearchProblem, COST_EPS};
use crate::serial::table::{NodeTable, Relax};
use crate::serial::{Expansion, Solution, Weight};
use crate::SearchError;

struct Shared<S> {
    table: NodeTable<S, usize>,
    /// Workers currently expanding a node they popped.
    busy: usize,
    done: bool,
    failure: Option<SearchError>,
    trace: Vec<Expansion<S>>,
    goal_index: Option<usize>,
}

/// Simple parallel A*: every worker pops from and pushes to one OPEN/CLOSED
/// pair guarded by a lock. Search ends when no OPEN node can beat the
/// incumbent and no worker is still expanding.
///
/// Only `workers`, `node_limit` and `record_expansions` of `cfg` apply.
pub fn spastar<P: SearchProblem>(problem: &P, cfg: &EngineConfig) -> Result<ParallelOutcome<P::State>, SearchError> {
    cfg.validate()?;
    let started = Instant::now();
    let shared = Mutex::new(Shared {
        table: NodeTable::new(Weight::ONE),
        busy: 0,
        done: false,
        failure: None,
        trace: Vec::new(),
        goal_index: None,
    });
    let wake = Condvar::new();
    let incumbent: Incumbent<P::State> = Incumbent::new();
    {
        let root = problem.initial();
        shared.lock().table.relax(root, 0.0, None, |s| problem.heuristic(s));
    }

    let stats: Vec<WorkerStats> = thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.workers)
            .map(|id| {
                let (shared, wake, incumbent) = (&shared, &wake, &incumbent);
                scope.spawn(move || worker(id, problem, cfg, shared, wake, incumbent))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let shared = shared.into_inner();
    if let Some(e) = shared.failure {
        return Err(e);
    }
    let mut summary = WorkerStats::summed(&stats);
    summary.wall_time = started.elapsed().as_secs_f64();
    let mut solution = match shared.goal_index {
        Some(i) => Solution { cost: incumbent.cost(), path: shared.table.path_to(i), stats: summary, expansions: Vec::new() },
        None => Solution::unsolvable(summary),
    };
    solution.expansions = shared.trace;
    Ok(ParallelOutcome { solution, workers: stats, termination: TerminationReport::default() })
}

fn worker<P: SearchProblem>(
    id: usize,
    problem: &P,
    cfg: &EngineConfig,
    shared: &Mutex<Shared<P::State>>,
    wake: &Condvar,
    incumbent: &Incumbent<P::State>,
) -> WorkerStats {
    let mut stats = WorkerStats::default();
    let mut succ: Vec<(P::State, Cost)> = Vec::new();
    let mut scored: Vec<(P::State, Cost, Cost)> = Vec::new();
    loop {
        let (i, state, g) = {
            let mut sh = shared.lock();
            loop {
                if sh.done {
                    return stats;
                }
                let best = sh.table.peek().map(|(_, f)| f);
                if best.is_some_and(|f| f < incumbent.cost() - COST_EPS) {
                    break;
                }
                if sh.busy == 0 {
                    sh.done = true;
                    wake.notify_all();
                    return stats;
                }
                wake.wait(&mut sh);
            }
            let i = sh.table.pop().expect("peeked");
            let n = sh.table.node(i);
            let (state, g, h) = (n.state.clone(), n.g, n.h);
            if cfg.record_expansions {
                sh.trace.push(Expansion { state: state.clone(), g, f: g + h, worker: id });
            }
            sh.busy += 1;
            (i, state, g)
        };
        stats.expanded += 1;

        if problem.is_goal(&state) {
            let mut sh = shared.lock();
            if incumbent.offer(g, &state, id) {
                sh.goal_index = Some(i);
            }
            sh.busy -= 1;
            wake.notify_all();
            continue;
        }

        succ.clear();
        problem.expand(&state, &mut succ);
        scored.clear();
        scored.extend(succ.drain(..).map(|(s, c)| {
            let h = problem.heuristic(&s);
            (s, g + c, h)
        }));
        stats.generated += scored.len() as u64;

        let mut sh = shared.lock();
        for (s, g1, h) in scored.drain(..) {
            match sh.table.relax(s, g1, Some(i), |_| h) {
                Relax::Reopened => stats.reopened += 1,
                Relax::Duplicate => stats.duplicates += 1,
                Relax::Inserted | Relax::Improved => {}
            }
        }
        stats.max_open = stats.max_open.max(sh.table.open_len() as u64);
        stats.stored = sh.table.len() as u64;
        sh.busy -= 1;
        if sh.table.len() > cfg.node_limit {
            sh.failure.get_or_insert(SearchError::NodeLimit { limit: cfg.node_limit });
            sh.done = true;
        }
        wake.notify_all();
    }
}
