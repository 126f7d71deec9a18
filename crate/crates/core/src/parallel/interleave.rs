use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use web_time::Instant;

use super::hda::{assemble, Envelope, HdaWorker};
use super::{EngineConfig, Incumbent, ParallelOutcome};
use crate::hashing::Distributor;
use crate::problem::SearchProblem;
use crate::termination::{Token, Visit};
use crate::SearchError;

/// Interleaver steps allowed before a run is abandoned.
const STEP_LIMIT: u64 = 50_000_000;
/// Worker expansions between forced flushes of partial batches.
const FLUSH_EVERY: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    /// Let a worker take one step: expand a node, or, when idle, flush its
    /// buffers and handle detection.
    Step(usize),
    /// Move the oldest envelope on the `from → to` channel into `to`'s mailbox.
    Deliver { from: usize, to: usize },
}

#[derive(Clone, Debug)]
pub enum SchedulePolicy {
    /// Each action is drawn from a seeded generator. The seed also fixes how
    /// strongly deliveries are delayed against steps.
    Random { seed: u64 },
    /// Run these actions (skipping any that are not enabled), then continue
    /// with a fair round-robin schedule.
    Scripted(Vec<Action>),
}

#[derive(Clone, Debug, Default)]
pub struct InterleaveReport {
    pub steps: u64,
    pub deliveries: u64,
    /// Global-state checks that failed when detection fired.
    pub violations: Vec<String>,
    /// Triplets still undelivered when detection fired.
    pub in_flight_at_detection: u64,
}

struct Sim<'a, P: SearchProblem> {
    problem: &'a P,
    p: usize,
    workers: Vec<HdaWorker<'a, P>>,
    channels: Vec<VecDeque<Envelope<P::State>>>,
    held: Vec<Option<Token>>,
    since_flush: Vec<u32>,
    outstanding: bool,
    done: bool,
    incumbent: Incumbent<P::State>,
    trace: Vec<crate::serial::Expansion<P::State>>,
    record: bool,
    report: InterleaveReport,
}

impl<'a, P: SearchProblem> Sim<'a, P> {
    fn channel(&mut self, from: usize, to: usize) -> &mut VecDeque<Envelope<P::State>> {
        &mut self.channels[from * self.p + to]
    }

    fn flush(&mut self, i: usize, partial: bool) {
        for (dest, m) in self.workers[i].take_batches(partial) {
            self.channel(i, dest).push_back(Envelope::Work(m));
        }
    }

    fn step(&mut self, i: usize) -> Result<(), SearchError> {
        self.report.steps += 1;
        if self.workers[i].step(&self.incumbent)? {
            if self.record {
                self.trace.append(&mut self.workers[i].expansions);
            }
            self.since_flush[i] += 1;
            let partial = self.since_flush[i] >= FLUSH_EVERY;
            self.flush(i, partial);
            if partial {
                self.since_flush[i] = 0;
            }
            return Ok(());
        }
        self.flush(i, true);
        self.since_flush[i] = 0;
        let visit = if let Some(t) = self.held[i].take() {
            self.workers[i].detector.visit(t)
        } else if i == 0 && !self.outstanding {
            self.outstanding = true;
            self.workers[0].detector.initiate()
        } else {
            return Ok(());
        };
        match visit {
            Visit::Forward { to, token } => self.channel(i, to).push_back(Envelope::Control(token)),
            Visit::Decided(true) => {
                self.check_safety();
                self.done = true;
            }
            Visit::Decided(false) => self.outstanding = false,
        }
        Ok(())
    }

    fn deliver(&mut self, from: usize, to: usize) -> Result<bool, SearchError> {
        let Some(env) = self.channel(from, to).pop_front() else { return Ok(false) };
        self.report.deliveries += 1;
        match env {
            Envelope::Work(m) => self.workers[to].absorb(m)?,
            Envelope::Control(t) => self.held[to] = Some(t),
        }
        Ok(true)
    }

    fn nonempty_channels(&self) -> Vec<(usize, usize)> {
        (0..self.p * self.p)
            .filter(|&k| !self.channels[k].is_empty())
            .map(|k| (k / self.p, k % self.p))
            .collect()
    }

    /// Detection fired: nothing that could still improve the incumbent may
    /// be in flight or on any OPEN list.
    fn check_safety(&mut self) {
        let bound = self.incumbent.cost() - 1e-9;
        let mut in_flight = 0u64;
        for (k, ch) in self.channels.iter().enumerate() {
            for env in ch {
                if let Envelope::Work(m) = env {
                    for t in &m.batch {
                        in_flight += 1;
                        let f = t.g + self.problem.heuristic(&t.state);
                        if f < bound {
                            self.report.violations.push(format!(
                                "improving triplet {:?} (f = {f}) undelivered on channel {} → {}",
                                t.state,
                                k / self.p,
                                k % self.p
                            ));
                        }
                    }
                }
            }
        }
        self.report.in_flight_at_detection = in_flight;
        if in_flight > 0 {
            self.report.violations.push(format!("{in_flight} triplets in flight at detection"));
        }
        for w in &self.workers {
            if let Some(f) = w.min_open_f() {
                if f < bound {
                    self.report.violations.push(format!("worker {} holds open f = {f} below incumbent", w.id));
                }
            }
            if !w.outbox_empty() {
                self.report.violations.push(format!("worker {} has unsent triplets", w.id));
            }
        }
        let sent: u64 = self.workers.iter().map(|w| w.stats.sent).sum();
        let received: u64 = self.workers.iter().map(|w| w.stats.received).sum();
        if sent != received {
            self.report.violations.push(format!("sent {sent} triplets, received {received}"));
        }
    }
}

/// Runs HDA* workers on the calling thread under a controlled schedule. The
/// outcome depends only on the problem, the configuration and the policy.
pub fn hdastar_interleaved<P: SearchProblem>(
    problem: &P,
    dist: &Distributor<P::State>,
    cfg: &EngineConfig,
    policy: SchedulePolicy,
) -> Result<(ParallelOutcome<P::State>, InterleaveReport), SearchError>
{
    cfg.validate()?;
    dist.check_workers(cfg.workers).map_err(|e| SearchError::config(e.to_string()))?;
    let started = Instant::now();
    let p = cfg.workers;
    let mut sim = Sim {
        problem,
        p,
        workers: (0..p).map(|id| HdaWorker::new(id, problem, dist, cfg)).collect(),
        channels: (0..p * p).map(|_| VecDeque::new()).collect(),
        held: vec![None; p],
        since_flush: vec![0; p],
        outstanding: false,
        done: false,
        incumbent: Incumbent::new(),
        trace: Vec::new(),
        record: cfg.record_expansions,
        report: InterleaveReport::default(),
    };
    let root = problem.initial();
    let root_owner = sim.workers[0].owner(&root);
    sim.workers[root_owner].seed_root()?;

    let mut rng = ChaCha8Rng::seed_from_u64(match &policy {
        SchedulePolicy::Random { seed } => *seed,
        SchedulePolicy::Scripted(_) => cfg.seed,
    });
    let deliver_bias: f64 = rng.gen_range(0.15..0.95);
    let mut script = match policy {
        SchedulePolicy::Scripted(actions) => actions.into_iter(),
        SchedulePolicy::Random { .. } => Vec::new().into_iter(),
    };
    let random = script.len() == 0;
    let mut fair_turn = 0usize;

    while !sim.done {
        if sim.report.steps + sim.report.deliveries > STEP_LIMIT {
            return Err(SearchError::StepLimit(STEP_LIMIT));
        }
        if let Some(action) = script.next() {
            match action {
                Action::Step(i) if i < p => sim.step(i)?,
                Action::Deliver { from, to } if from < p && to < p => {
                    sim.deliver(from, to)?;
                }
                _ => {}
            }
        } else if random {
            let ready = sim.nonempty_channels();
            if !ready.is_empty() && rng.gen_bool(deliver_bias) {
                let (from, to) = ready[rng.gen_range(0..ready.len())];
                sim.deliver(from, to)?;
            } else {
                sim.step(rng.gen_range(0..p))?;
            }
        } else {
            if fair_turn < p {
                sim.step(fair_turn)?;
            } else {
                for (from, to) in sim.nonempty_channels() {
                    sim.deliver(from, to)?;
                }
            }
            fair_turn = (fair_turn + 1) % (p + 1);
        }
    }

    let Sim { workers, incumbent, trace, record, report, .. } = sim;
    let outcome = assemble(problem, workers, &incumbent, started, record.then_some(trace))?;
    Ok((outcome, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{ExplicitGraph, TilePuzzle, TileState};
    use crate::hashing::{HashConfig, StrategyKind};
    use crate::serial::{astar, SearchOptions};
    use crate::termination::TerminationMode;

    #[test]
    fn random_schedules_find_optimum() {
        let pz = TilePuzzle::new(TileState::random_solvable(3, 11));
        let want = astar(&pz, &SearchOptions::default()).unwrap().cost;
        let dist = Distributor::new(&pz, StrategyKind::Zobrist, &HashConfig::default()).unwrap();
        for seed in 0..20 {
            for mode in [TerminationMode::TwoWave, TerminationMode::Time] {
                let cfg = EngineConfig { termination: mode, ..EngineConfig::new(3, StrategyKind::Zobrist) };
                let (out, rep) = hdastar_interleaved(&pz, &dist, &cfg, SchedulePolicy::Random { seed }).unwrap();
                assert_eq!(out.solution.cost, want);
                assert!(rep.violations.is_empty(), "{:?}", rep.violations);
            }
        }
    }

    #[test]
    fn same_seed_same_run() {
        let pz = TilePuzzle::new(TileState::random_solvable(3, 5));
        let dist = Distributor::new(&pz, StrategyKind::Random, &HashConfig::default()).unwrap();
        let cfg = EngineConfig::new(4, StrategyKind::Random);
        let a = hdastar_interleaved(&pz, &dist, &cfg, SchedulePolicy::Random { seed: 9 }).unwrap();
        let b = hdastar_interleaved(&pz, &dist, &cfg, SchedulePolicy::Random { seed: 9 }).unwrap();
        assert_eq!(a.0.workers, b.0.workers);
        assert_eq!(a.1.steps, b.1.steps);
    }

    #[test]
    fn missorder_reopens_on_owner() {
        let g = ExplicitGraph::missorder();
        let b = g.id("b").unwrap();
        let dist = Distributor::custom(move |s: &u32, _p| usize::from(*s == b));
        let cfg = EngineConfig::new(2, StrategyKind::Custom);
        let script = vec![
            Action::Step(0), // a: b goes to worker 1, c stays
            Action::Step(0), // c: d reached with g = 4
            Action::Step(0), // d: incumbent 4
            Action::Step(0), // idle: flush b
            Action::Deliver { from: 0, to: 1 },
            Action::Step(1), // b: d offered with g = 2
            Action::Step(1),
            Action::Deliver { from: 1, to: 0 },
            Action::Step(0),
        ];
        let (out, rep) = hdastar_interleaved(&g, &dist, &cfg, SchedulePolicy::Scripted(script)).unwrap();
        assert_eq!(out.solution.cost, 2.0);
        assert!(out.workers[0].reopened >= 1);
        assert!(rep.violations.is_empty());
        let names: Vec<&str> = out.solution.path.iter().map(|&s| g.name(s)).collect();
        assert_eq!(names, ["a", "b", "d"]);
    }
}
