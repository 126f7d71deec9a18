//! Serial and parallel optimal state-space search.
//!
//! The crate is organised around one contract, [`SearchProblem`], which every
//! concrete domain implements and every engine consumes:
//!
//! * [`domains`]: sliding-tile puzzle, octile gridmaps, explicit weighted
//!   digraphs and n-dimensional lattices.
//! * [`serial`]: A*, weighted A*, uniform-cost search and IDA*.
//! * [`hashing`]: work-distribution functions mapping states to owner workers.
//! * [`parallel`]: SPA*, hash-distributed A*, parallel window IDA*, dovetailing
//!   and a deterministic single-threaded interleaver for reproducible schedules.
//! * [`termination`]: counter-based distributed termination detection.
//! * [`metrics`]: search/communication overhead, load balance, speedup.
//! * [`allocation`]: iterative-allocation cost simulator.

pub mod allocation;
pub mod domains;
pub mod error;
pub mod hashing;
pub mod metrics;
pub mod parallel;
pub mod problem;
pub mod record;
pub mod serial;
pub mod termination;

pub use error::SearchError;
pub use problem::{Cost, SearchProblem, COST_EPS};
pub use serial::{SearchOptions, SearchStats, Solution};
