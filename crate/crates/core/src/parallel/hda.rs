use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;
use std::time::Duration;

use crossbeam_channel::{unbounded, RecvTimeoutError, Sender, TryRecvError};
use parking_lot::Mutex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use web_time::Instant;

use super::{EngineConfig, Incumbent, ParallelOutcome, TerminationReport, WorkerStats};
use crate::hashing::Distributor;
use crate::problem::{validate_path, Cost, SearchProblem, COST_EPS};
use crate::serial::table::{NodeTable, Relax};
use crate::serial::{Expansion, Solution, Weight};
use crate::termination::{Detector, Token, Visit};
use crate::SearchError;

/// A path offer `(state, g, parent)` sent to the state's owner.
#[derive(Clone, Debug)]
pub(crate) struct Triplet<S> {
    pub state: S,
    pub g: Cost,
    pub parent: Option<S>,
}

#[derive(Clone, Debug)]
pub(crate) struct Message<S> {
    pub sender: usize,
    pub seq: u64,
    /// Sender's logical clock, for the time algorithm.
    pub stamp: u64,
    pub batch: Vec<Triplet<S>>,
}

#[derive(Clone, Debug)]
pub(crate) enum Envelope<S> {
    Work(Message<S>),
    Control(Token),
}

/// One HDA* worker: private OPEN/CLOSED, outgoing buffers per destination and
/// a termination detector. Drivers decide when it steps and how its messages
/// travel.
pub(crate) struct HdaWorker<'a, P: SearchProblem> {
    pub id: usize,
    p: usize,
    problem: &'a P,
    dist: &'a Distributor<P::State>,
    pub table: NodeTable<P::State, P::State>,
    outbox: Vec<Vec<Triplet<P::State>>>,
    batch: usize,
    rng: ChaCha8Rng,
    scratch: Vec<u32>,
    succ: Vec<(P::State, Cost)>,
    next_seq: u64,
    /// Last sequence number received from each sender.
    last_seq: Vec<u64>,
    node_limit: usize,
    record: bool,
    check_owner: bool,
    pub stats: WorkerStats,
    pub detector: Detector,
    pub expansions: Vec<Expansion<P::State>>,
}

impl<'a, P: SearchProblem> HdaWorker<'a, P> {
    pub fn new(id: usize, problem: &'a P, dist: &'a Distributor<P::State>, cfg: &EngineConfig) -> Self {
        let p = cfg.workers;
        HdaWorker {
            id,
            p,
            problem,
            dist,
            table: NodeTable::new(Weight::ONE),
            outbox: (0..p).map(|_| Vec::new()).collect(),
            batch: cfg.batch_size(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            scratch: Vec::new(),
            succ: Vec::new(),
            next_seq: 0,
            last_seq: vec![0; p],
            node_limit: cfg.node_limit,
            record: cfg.record_expansions,
            check_owner: cfg!(debug_assertions) && dist.is_deterministic(),
            stats: WorkerStats::default(),
            detector: Detector::new(id, p, cfg.termination),
            expansions: Vec::new(),
        }
    }

    pub fn owner(&mut self, s: &P::State) -> usize {
        self.dist.owner(self.problem, s, self.p, &mut self.rng, &mut self.scratch)
    }

    fn insert(&mut self, t: Triplet<P::State>) -> Result<(), SearchError> {
        if self.check_owner {
            let o = self.owner(&t.state);
            assert_eq!(o, self.id, "state {:?} inserted on worker {} but owned by {}", t.state, self.id, o);
        }
        let problem = self.problem;
        match self.table.relax(t.state, t.g, t.parent, |s| problem.heuristic(s)) {
            Relax::Reopened => self.stats.reopened += 1,
            Relax::Duplicate => self.stats.duplicates += 1,
            Relax::Inserted | Relax::Improved => {}
        }
        if self.table.len() > self.node_limit {
            return Err(SearchError::NodeLimit { limit: self.node_limit });
        }
        Ok(())
    }

    /// Inserts the root; called on the root's owner only.
    pub fn seed_root(&mut self) -> Result<(), SearchError> {
        let root = self.problem.initial();
        self.insert(Triplet { state: root, g: 0.0, parent: None })
    }

    pub fn absorb(&mut self, msg: Message<P::State>) -> Result<(), SearchError> {
        assert!(msg.seq > self.last_seq[msg.sender], "mailbox reordered messages from worker {}", msg.sender);
        self.last_seq[msg.sender] = msg.seq;
        self.detector.on_receive(msg.stamp);
        self.stats.messages_received += 1;
        self.stats.received += msg.batch.len() as u64;
        for t in msg.batch {
            self.insert(t)?;
        }
        Ok(())
    }

    /// No OPEN node can improve on `incumbent`.
    pub fn idle(&mut self, incumbent: Cost) -> bool {
        match self.table.peek() {
            None => true,
            Some((_, f)) => f >= incumbent - COST_EPS,
        }
    }

    pub fn min_open_f(&self) -> Option<Cost> {
        self.table.min_open_f()
    }

    pub fn outbox_empty(&self) -> bool {
        self.outbox.iter().all(Vec::is_empty)
    }

    /// Expands the best OPEN node unless the worker is idle. Returns whether
    /// a node was expanded.
    pub fn step(&mut self, incumbent: &Incumbent<P::State>) -> Result<bool, SearchError> {
        if self.idle(incumbent.cost()) {
            return Ok(false);
        }
        let i = self.table.pop().expect("peeked");
        let node = self.table.node(i);
        let (g, h) = (node.g, node.h);
        let state = node.state.clone();
        self.stats.expanded += 1;
        self.detector.note_active();
        if self.record {
            self.expansions.push(Expansion { state: state.clone(), g, f: g + h, worker: self.id });
        }
        if self.problem.is_goal(&state) {
            incumbent.offer(g, &state, self.id);
            return Ok(true);
        }
        let mut succ = std::mem::take(&mut self.succ);
        succ.clear();
        self.problem.expand(&state, &mut succ);
        for (next, c) in succ.drain(..) {
            self.stats.generated += 1;
            let owner = self.owner(&next);
            let t = Triplet { state: next, g: g + c, parent: Some(state.clone()) };
            if owner == self.id {
                self.insert(t)?;
            } else {
                self.stats.sent += 1;
                self.outbox[owner].push(t);
            }
        }
        self.succ = succ;
        self.stats.max_open = self.stats.max_open.max(self.table.open_len() as u64);
        self.stats.stored = self.table.len() as u64;
        Ok(true)
    }

    fn message(&mut self, batch: Vec<Triplet<P::State>>) -> Message<P::State> {
        let stamp = self.detector.on_send();
        self.stats.messages_sent += 1;
        self.next_seq += 1;
        Message { sender: self.id, seq: self.next_seq, stamp, batch }
    }

    /// Full batches ready to go, or every buffered triplet when `partial`.
    pub fn take_batches(&mut self, partial: bool) -> Vec<(usize, Message<P::State>)> {
        let mut out = Vec::new();
        for dest in 0..self.p {
            while self.outbox[dest].len() >= self.batch || (partial && !self.outbox[dest].is_empty()) {
                let n = self.outbox[dest].len().min(self.batch);
                let rest = self.outbox[dest].split_off(n);
                let batch = std::mem::replace(&mut self.outbox[dest], rest);
                let msg = self.message(batch);
                out.push((dest, msg));
            }
        }
        out
    }

    pub fn finish_stats(&mut self) {
        self.stats.stored = self.table.len() as u64;
    }
}

/// Walks parent states back from the goal through every worker's table,
/// taking the cheapest stored record of each state.
pub(crate) fn reconstruct<P: SearchProblem>(
    problem: &P,
    tables: &[&NodeTable<P::State, P::State>],
    goal: P::State,
    cost: Cost,
) -> Result<Vec<P::State>, SearchError> {
    let mut path = Vec::new();
    let mut seen = HashSet::new();
    let mut cur = goal;
    loop {
        if !seen.insert(cur.clone()) {
            return Err(SearchError::InvalidPath(format!("parent cycle at {cur:?}")));
        }
        let rec = tables
            .iter()
            .filter_map(|t| t.get(&cur))
            .min_by(|a, b| a.g.total_cmp(&b.g))
            .ok_or_else(|| SearchError::InvalidPath(format!("no record of {cur:?}")))?;
        let parent = rec.parent.clone();
        path.push(cur);
        match parent {
            Some(p) => cur = p,
            None => break,
        }
    }
    path.reverse();
    let walked = validate_path(problem, &path).map_err(SearchError::InvalidPath)?;
    if walked > cost + 1e-6 * cost.abs().max(1.0) {
        return Err(SearchError::InvalidPath(format!("path costs {walked}, incumbent {cost}")));
    }
    Ok(path)
}

pub(crate) fn assemble<P: SearchProblem>(
    problem: &P,
    mut workers: Vec<HdaWorker<'_, P>>,
    incumbent: &Incumbent<P::State>,
    started: Instant,
    expansions: Option<Vec<Expansion<P::State>>>,
) -> Result<ParallelOutcome<P::State>, SearchError> {
    for w in &mut workers {
        w.finish_stats();
    }
    let stats: Vec<WorkerStats> = workers.iter().map(|w| w.stats.clone()).collect();
    let mut summary = WorkerStats::summed(&stats);
    summary.wall_time = started.elapsed().as_secs_f64();
    let termination = TerminationReport {
        mode: Some(workers[0].detector.mode()),
        attempts: workers[0].detector.attempts(),
        rings: workers[0].detector.rings(),
    };
    let cost = incumbent.cost();
    let mut solution = match incumbent.goal() {
        Some((goal, _)) => {
            let tables: Vec<_> = workers.iter().map(|w| &w.table).collect();
            let path = reconstruct(problem, &tables, goal, cost)?;
            Solution { cost, path, stats: summary, expansions: Vec::new() }
        }
        None => Solution::unsolvable(summary),
    };
    solution.expansions =
        expansions.unwrap_or_else(|| workers.iter_mut().flat_map(|w| std::mem::take(&mut w.expansions)).collect());
    Ok(ParallelOutcome { solution, workers: stats, termination })
}

/// HDA* with the distribution function named in `cfg`.
pub fn hdastar<P: SearchProblem>(problem: &P, cfg: &EngineConfig) -> Result<ParallelOutcome<P::State>, SearchError>
{
    let dist = Distributor::new(problem, cfg.strategy, &cfg.hash).map_err(|e| SearchError::config(e.to_string()))?;
    hdastar_with(problem, &dist, cfg)
}

/// HDA* on one thread per worker with a caller-supplied distributor.
pub fn hdastar_with<P: SearchProblem>(
    problem: &P,
    dist: &Distributor<P::State>,
    cfg: &EngineConfig,
) -> Result<ParallelOutcome<P::State>, SearchError>
{
    cfg.validate()?;
    dist.check_workers(cfg.workers).map_err(|e| SearchError::config(e.to_string()))?;
    let started = Instant::now();
    let p = cfg.workers;
    let incumbent = Incumbent::new();
    let done = AtomicBool::new(false);
    let failure: Mutex<Option<SearchError>> = Mutex::new(None);
    let (senders, receivers): (Vec<_>, Vec<_>) = (0..p).map(|_| unbounded::<Envelope<P::State>>()).unzip();

    let mut root_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let root_owner = dist.owner(problem, &problem.initial(), p, &mut root_rng, &mut Vec::new());

    let workers: Vec<HdaWorker<'_, P>> = thread::scope(|scope| {
        let handles: Vec<_> = receivers
            .into_iter()
            .enumerate()
            .map(|(id, rx)| {
                let senders = senders.clone();
                let (incumbent, done, failure) = (&incumbent, &done, &failure);
                scope.spawn(move || {
                    let mut w = HdaWorker::new(id, problem, dist, cfg);
                    let mut run = || -> Result<(), SearchError> {
                        if id == root_owner {
                            w.seed_root()?;
                        }
                        worker_loop(&mut w, &rx, &senders, incumbent, done, cfg)
                    };
                    if let Err(e) = run() {
                        failure.lock().get_or_insert(e);
                        done.store(true, Ordering::Release);
                    }
                    w
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let sent: u64 = workers.iter().map(|w| w.stats.sent).sum();
    let received: u64 = workers.iter().map(|w| w.stats.received).sum();
    debug_assert_eq!(sent, received, "triplets lost in transit");
    assemble(problem, workers, &incumbent, started, None)
}

fn worker_loop<P: SearchProblem>(
    w: &mut HdaWorker<'_, P>,
    rx: &crossbeam_channel::Receiver<Envelope<P::State>>,
    senders: &[Sender<Envelope<P::State>>],
    incumbent: &Incumbent<P::State>,
    done: &AtomicBool,
    cfg: &EngineConfig,
) -> Result<(), SearchError> {
    let mut held: Option<Token> = None;
    let mut outstanding = false;
    let mut last_flush = Instant::now();
    let mut last_attempt = Instant::now();
    let wait = cfg.detection_interval.min(Duration::from_micros(200)).max(Duration::from_micros(20));

    let send = |dest: usize, env: Envelope<P::State>| {
        // A receiver only disappears once the search is over.
        let _ = senders[dest].send(env);
    };
    let handle = |w: &mut HdaWorker<'_, P>, env: Envelope<P::State>, held: &mut Option<Token>| match env {
        Envelope::Work(m) => w.absorb(m),
        Envelope::Control(t) => {
            *held = Some(t);
            Ok(())
        }
    };

    loop {
        if done.load(Ordering::Acquire) {
            return Ok(());
        }
        loop {
            match rx.try_recv() {
                Ok(env) => handle(w, env, &mut held)?,
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => return Ok(()),
            }
        }
        if w.step(incumbent)? {
            let partial = last_flush.elapsed() >= cfg.flush_interval;
            for (dest, m) in w.take_batches(partial) {
                send(dest, Envelope::Work(m));
            }
            if partial {
                last_flush = Instant::now();
            }
            continue;
        }
        for (dest, m) in w.take_batches(true) {
            send(dest, Envelope::Work(m));
        }
        last_flush = Instant::now();
        let visit = if let Some(t) = held.take() {
            Some(w.detector.visit(t))
        } else if w.id == 0 && !outstanding && last_attempt.elapsed() >= cfg.detection_interval {
            outstanding = true;
            Some(w.detector.initiate())
        } else {
            None
        };
        match visit {
            Some(Visit::Forward { to, token }) => send(to, Envelope::Control(token)),
            Some(Visit::Decided(true)) => {
                done.store(true, Ordering::Release);
                return Ok(());
            }
            Some(Visit::Decided(false)) => {
                outstanding = false;
                last_attempt = Instant::now();
            }
            None => {}
        }
        match rx.recv_timeout(wait) {
            Ok(env) => handle(w, env, &mut held)?,
            Err(RecvTimeoutError::Timeout) => {}
            Err(RecvTimeoutError::Disconnected) => return Ok(()),
        }
    }
}
