//! Parallel searchers.
//!
//! * [`spastar`]: one shared OPEN/CLOSED behind a lock.
//! * [`hdastar`]: hash-distributed A*, each worker owning the states its
//!   distribution function maps to it; successors travel as batched
//!   `(state, g, parent)` triplets.
//! * [`hdastar_interleaved`]: the same workers driven step by step on one
//!   thread under a seeded or scripted schedule.
//! * [`parallel_window`]: IDA* iterations with different bounds run
//!   concurrently.
//! * [`dovetail`]: independent weighted A* runs, first answer wins.

mod dovetail;
mod hda;
mod interleave;
mod spa;
mod window;

pub use dovetail::{dovetail, DovetailOutcome, DEFAULT_WEIGHTS};
pub use hda::{hdastar, hdastar_with};
pub use interleave::{hdastar_interleaved, Action, InterleaveReport, SchedulePolicy};
pub use spa::spastar;
pub use window::parallel_window;

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::hashing::{HashConfig, StrategyKind};
use crate::problem::{Cost, COST_EPS};
use crate::serial::{SearchStats, Solution, DEFAULT_NODE_LIMIT};
use crate::termination::TerminationMode;
use crate::SearchError;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub workers: usize,
    pub strategy: StrategyKind,
    pub hash: HashConfig,
    /// Triplets packed per message; `None` picks 10 below 16 workers and 100
    /// from 16 up.
    pub batch: Option<usize>,
    /// Seeds per-worker generators (random owners, schedules).
    pub seed: u64,
    /// Stored nodes allowed per worker.
    pub node_limit: usize,
    pub termination: TerminationMode,
    /// A partial batch is sent at the latest this long after the last flush.
    pub flush_interval: Duration,
    /// Minimum time between two detection rounds started by worker 0.
    pub detection_interval: Duration,
    pub record_expansions: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            workers: 1,
            strategy: StrategyKind::Zobrist,
            hash: HashConfig::default(),
            batch: None,
            seed: 42,
            node_limit: DEFAULT_NODE_LIMIT,
            termination: TerminationMode::TwoWave,
            flush_interval: Duration::from_millis(1),
            detection_interval: Duration::from_micros(500),
            record_expansions: false,
        }
    }
}

impl EngineConfig {
    pub fn new(workers: usize, strategy: StrategyKind) -> Self {
        EngineConfig { workers, strategy, ..Default::default() }
    }

    pub fn batch_size(&self) -> usize {
        self.batch.unwrap_or(if self.workers < 16 { 10 } else { 100 })
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.workers == 0 {
            return Err(SearchError::config("at least one worker is required"));
        }
        if self.batch == Some(0) {
            return Err(SearchError::config("batch size must be at least 1"));
        }
        Ok(())
    }
}

/// Counters of one worker.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkerStats {
    pub expanded: u64,
    pub generated: u64,
    pub reopened: u64,
    pub duplicates: u64,
    /// Triplets routed to another worker.
    pub sent: u64,
    /// Triplets received from other workers.
    pub received: u64,
    pub messages_sent: u64,
    pub messages_received: u64,
    pub max_open: u64,
    pub stored: u64,
}

impl WorkerStats {
    pub fn summed(workers: &[WorkerStats]) -> SearchStats {
        let mut s = SearchStats::default();
        for w in workers {
            s.expanded += w.expanded;
            s.generated += w.generated;
            s.reopened += w.reopened;
            s.duplicates += w.duplicates;
            s.max_open = s.max_open.max(w.max_open);
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TerminationReport {
    pub mode: Option<TerminationMode>,
    /// Detection rounds started.
    pub attempts: u64,
    /// Trips of the control token around the ring.
    pub rings: u64,
}

#[derive(Clone, Debug)]
pub struct ParallelOutcome<S> {
    pub solution: Solution<S>,
    pub workers: Vec<WorkerStats>,
    pub termination: TerminationReport,
}

/// Best solution found so far, shared by all workers. The cost only
/// decreases.
pub struct Incumbent<S> {
    cost_bits: AtomicU64,
    best: Mutex<Option<(S, usize)>>,
    updates: AtomicU64,
}

impl<S: Clone> Default for Incumbent<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Clone> Incumbent<S> {
    pub fn new() -> Self {
        Incumbent { cost_bits: AtomicU64::new(f64::INFINITY.to_bits()), best: Mutex::new(None), updates: AtomicU64::new(0) }
    }

    #[inline]
    pub fn cost(&self) -> Cost {
        f64::from_bits(self.cost_bits.load(Ordering::Acquire))
    }

    /// Installs `goal` if `cost` beats the current incumbent.
    pub fn offer(&self, cost: Cost, goal: &S, worker: usize) -> bool {
        if cost >= self.cost() - COST_EPS {
            return false;
        }
        let mut best = self.best.lock();
        if cost >= self.cost() - COST_EPS {
            return false;
        }
        *best = Some((goal.clone(), worker));
        self.cost_bits.store(cost.to_bits(), Ordering::Release);
        self.updates.fetch_add(1, Ordering::Relaxed);
        true
    }

    pub fn goal(&self) -> Option<(S, usize)> {
        self.best.lock().clone()
    }

    pub fn updates(&self) -> u64 {
        self.updates.load(Ordering::Relaxed)
    }
}
