//! Parallel overheads of a run measured against its serial baseline.
//!
//! * search overhead `SO = expanded_par / expanded_serial − 1` (may be
//!   negative: a parallel run can expand fewer nodes with f = C*)
//! * communication overhead `CO = triplets sent to another worker / generated`
//! * load balance `LB = max per-worker expanded / mean per-worker expanded`
//! * efficiency fraction: share of expansions with `f < C* − 1e−9`
//! * speedup: serial wall time over parallel wall time

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel::WorkerStats;
use crate::problem::Cost;
use crate::serial::{Expansion, SearchStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("load balance is undefined when no worker expanded a node")]
    UndefinedLoadBalance,
    #[error("efficiency fraction is undefined without expansions")]
    NoExpansions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub so: f64,
    pub co: f64,
    pub lb: f64,
    pub efficiency_fraction: Option<f64>,
    pub speedup: f64,
    pub expanded: Vec<u64>,
    pub generated: Vec<u64>,
    pub sent: Vec<u64>,
}

/// Overheads of a parallel run given its per-worker counters and wall time.
pub fn overheads(serial: &SearchStats, workers: &[WorkerStats], wall_time: f64) -> Result<OverheadReport, MetricsError> {
    let expanded: Vec<u64> = workers.iter().map(|w| w.expanded).collect();
    let total: u64 = expanded.iter().sum();
    let generated: u64 = workers.iter().map(|w| w.generated).sum();
    let sent: u64 = workers.iter().map(|w| w.sent).sum();
    let lb = load_balance(&expanded)?;
    let so = if serial.expanded == 0 { 0.0 } else { total as f64 / serial.expanded as f64 - 1.0 };
    let co = if generated == 0 { 0.0 } else { sent as f64 / generated as f64 };
    let speedup = if wall_time > 0.0 { serial.wall_time / wall_time } else { f64::INFINITY };
    Ok(OverheadReport {
        so,
        co,
        lb,
        efficiency_fraction: None,
        speedup,
        expanded,
        generated: workers.iter().map(|w| w.generated).collect(),
        sent: workers.iter().map(|w| w.sent).collect(),
    })
}

/// Max over mean of per-worker shares.
pub fn load_balance(shares: &[u64]) -> Result<f64, MetricsError> {
    let total: u64 = shares.iter().sum();
    if total == 0 {
        return Err(MetricsError::UndefinedLoadBalance);
    }
    let mean = total as f64 / shares.len() as f64;
    Ok(*shares.iter().max().unwrap() as f64 / mean)
}

pub fn efficiency_fraction<S>(expansions: &[Expansion<S>], c_star: Cost) -> Result<f64, MetricsError> {
    if expansions.is_empty() {
        return Err(MetricsError::NoExpansions);
    }
    let below = expansions.iter().filter(|e| e.f < c_star - 1e-9).count();
    Ok(below as f64 / expansions.len() as f64)
}
