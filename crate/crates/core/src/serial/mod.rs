//! Serial reference algorithms. They double as correctness oracles for the
//! parallel engines.

mod astar;
mod idastar;
pub(crate) mod table;

pub use astar::{astar, best_first, uniform_cost, wastar};
pub use idastar::{idastar, DepthFirstIteration, IterationResult};

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::problem::Cost;

/// Priority weight: `g + w·h` for finite `w`, `h` alone for `w = ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Finite(f64),
    Infinite,
}

impl Weight {
    pub const ONE: Weight = Weight::Finite(1.0);

    #[inline]
    pub fn priority(self, g: Cost, h: Cost) -> Cost {
        match self {
            Weight::Finite(1.0) => g + h,
            Weight::Finite(w) => g + w * h,
            Weight::Infinite => h,
        }
    }

    pub fn is_one(self) -> bool {
        self == Weight::ONE
    }

    /// Suboptimality factor the weight guarantees, if any.
    pub fn bound(self) -> Option<f64> {
        match self {
            Weight::Finite(w) => Some(w),
            Weight::Infinite => None,
        }
    }
}

impl FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Weight::Infinite),
            t => match t.parse::<f64>() {
                Ok(w) if w >= 1.0 && w.is_finite() => Ok(Weight::Finite(w)),
                Ok(w) if w.is_infinite() => Ok(Weight::Infinite),
                _ => Err(format!("weight must be ≥ 1 or inf, got `{t}`")),
            },
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

/// Default cap on stored nodes per run (per worker for distributed engines).
pub const DEFAULT_NODE_LIMIT: usize = 10_000_000;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub node_limit: usize,
    /// Record every expansion (state, g, f, worker) in [`Solution::expansions`].
    pub record_expansions: bool,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_limit: DEFAULT_NODE_LIMIT, record_expansions: false, cancel: None }
    }
}

impl SearchOptions {
    pub fn recording() -> Self {
        SearchOptions { record_expansions: true, ..Default::default() }
    }

    pub(crate) fn cancelled(&self) -> bool {
        self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub bound: Cost,
    pub expanded: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub reopened: u64,
    pub duplicates: u64,
    pub max_open: u64,
    /// Seconds.
    pub wall_time: f64,
    /// Per-iteration expansions of iterative-deepening searches.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<IterationStats>,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.expanded += other.expanded;
        self.generated += other.generated;
        self.reopened += other.reopened;
        self.duplicates += other.duplicates;
        self.max_open = self.max_open.max(other.max_open);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion<S> {
    pub state: S,
    pub g: Cost,
    pub f: Cost,
    pub worker: usize,
}

#[derive(Clone, Debug)]
pub struct Solution<S> {
    /// `f64::INFINITY` when no goal is reachable.
    pub cost: Cost,
    pub path: Vec<S>,
    pub stats: SearchStats,
    pub expansions: Vec<Expansion<S>>,
}

impl<S> Solution<S> {
    pub fn unsolvable(stats: SearchStats) -> Self {
        Solution { cost: f64::INFINITY, path: Vec::new(), stats, expansions: Vec::new() }
    }

    pub fn is_solved(&self) -> bool {
        self.cost.is_finite()
    }
}
