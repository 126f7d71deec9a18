//! Iterative allocation: rerun a memory-hungry solver on ⌈bⁱ⌉ hardware
//! allocation units (HAUs) at iteration i until one iteration succeeds, and
//! account for what that costs under continuous or hourly billing.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocationError {
    #[error("growth factor must exceed 1, got {0}")]
    BadBase(f64),
    #[error("no width up to {max_width} HAUs solves the problem (minimal width {w_plus})")]
    MaxWidthExceeded { max_width: u64, w_plus: u64 },
    #[error("invalid solver profile: {0}")]
    BadProfile(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostModelKind {
    /// Cost of `t` hours on `v` HAUs is `t·v`.
    Continuous,
    /// Time is billed in whole hours.
    Discrete,
}

impl fmt::Display for CostModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModelKind::Continuous => "continuous",
            CostModelKind::Discrete => "discrete",
        })
    }
}

impl FromStr for CostModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(CostModelKind::Continuous),
            "discrete" => Ok(CostModelKind::Discrete),
            other => Err(format!("unknown cost model `{other}` (expected continuous|discrete)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub kind: CostModelKind,
    /// Discrete model only: iterations sharing an hour reuse the HAUs already
    /// paid for, so each hour costs the widest allocation active in it.
    /// Without reuse every iteration pays `⌈duration⌉·v` on its own.
    pub spare_reuse: bool,
}

impl CostModel {
    pub fn continuous() -> Self {
        CostModel { kind: CostModelKind::Continuous, spare_reuse: false }
    }

    pub fn discrete() -> Self {
        CostModel { kind: CostModelKind::Discrete, spare_reuse: true }
    }

    /// Cost of a single run of `hours` on `v` HAUs.
    pub fn run_cost(&self, hours: f64, v: u64) -> f64 {
        match self.kind {
            CostModelKind::Continuous => hours * v as f64,
            CostModelKind::Discrete => hours.ceil() * v as f64,
        }
    }
}

pub type Makespan = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SolverProfile {
    /// Fewest HAUs on which the solver succeeds.
    pub w_plus: u64,
    /// Hours a failing iteration runs before memory runs out.
    pub e: f64,
    /// Hours to solve on `v ≥ w_plus` HAUs.
    pub makespan: Makespan,
}

impl fmt::Debug for SolverProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverProfile").field("w_plus", &self.w_plus).field("e", &self.e).finish()
    }
}

impl SolverProfile {
    /// Profile whose successful runs take one hour at any width.
    pub fn unit(w_plus: u64, e: f64) -> Self {
        SolverProfile { w_plus, e, makespan: Arc::new(|_| 1.0) }
    }

    fn validate(&self) -> Result<(), AllocationError> {
        if self.w_plus == 0 {
            return Err(AllocationError::BadProfile("minimal width must be at least 1".into()));
        }
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(AllocationError::BadProfile(format!("max iteration time must be positive, got {}", self.e)));
        }
        Ok(())
    }
}

/// `[⌈b⁰⌉, ⌈b¹⌉, …, ⌈b^{k−1}⌉]`.
pub fn geometric_sequence(b: f64, k: usize) -> Result<Vec<u64>, AllocationError> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(AllocationError::BadBase(b));
    }
    Ok((0..k).map(|i| width(b, i as i32)).collect())
}

fn width(b: f64, i: i32) -> u64 {
    // Absorb rounding noise so exact powers do not round up a unit.
    (b.powi(i) - 1e-9).ceil().max(1.0) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IaOutcome {
    pub total_cost: f64,
    /// Widths of all iterations, the last one successful.
    pub widths: Vec<u64>,
    pub optimal_cost: f64,
    pub ratio: f64,
}

/// Cheapest single run at any width from `w_plus` to `max_width`.
pub fn optimal_cost(profile: &SolverProfile, model: CostModel, max_width: u64) -> f64 {
    (profile.w_plus..=max_width.max(profile.w_plus))
        .map(|v| model.run_cost((profile.makespan)(v), v))
        .fold(f64::INFINITY, f64::min)
}

/// Simulates iterative allocation with growth factor `b`.
pub fn ia_total_cost(
    profile: &SolverProfile,
    b: f64,
    model: CostModel,
    max_width: u64,
) -> Result<IaOutcome, AllocationError> {
    profile.validate()?;
    if !(b > 1.0 && b.is_finite()) {
        return Err(AllocationError::BadBase(b));
    }
    let mut runs: Vec<(u64, f64)> = Vec::new();
    for i in 0.. {
        let v = width(b, i);
        if v > max_width {
            return Err(AllocationError::MaxWidthExceeded { max_width, w_plus: profile.w_plus });
        }
        let solved = v >= profile.w_plus;
        runs.push((v, if solved { (profile.makespan)(v) } else { profile.e }));
        if solved {
            break;
        }
    }
    let total_cost = match (model.kind, model.spare_reuse) {
        (CostModelKind::Discrete, true) => shared_hours_cost(&runs),
        _ => runs.iter().map(|&(v, t)| model.run_cost(t, v)).sum(),
    };
    let optimal = optimal_cost(profile, model, max_width);
    Ok(IaOutcome {
        total_cost,
        widths: runs.iter().map(|r| r.0).collect(),
        optimal_cost: optimal,
        ratio: total_cost / optimal,
    })
}

/// Runs back to back on one timeline. A HAU is held from the start of the
/// first run that uses it to the end of the last run, and each HAU pays for
/// every started hour of that span.
fn shared_hours_cost(runs: &[(u64, f64)]) -> f64 {
    let end: f64 = runs.iter().map(|r| r.1).sum();
    let mut start = 0.0;
    let mut held = 0;
    let mut total = 0.0;
    for &(v, d) in runs {
        if v > held {
            total += (v - held) as f64 * (end - start - 1e-12).ceil().max(1.0);
            held = v;
        }
        start += d;
    }
    total
}

/// Worst-case and average-case cost ratio bounds of the geometric strategy
/// under discrete billing with `E ≤ 1`: `(b²/(b−1), 2b²/(b²−1))`.
pub fn ratio_bounds(b: f64) -> Result<(f64, f64), AllocationError> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(AllocationError::BadBase(b));
    }
    Ok((b * b / (b - 1.0), 2.0 * b * b / (b * b - 1.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IaRow {
    #[serde(rename = "W_plus")]
    pub w_plus: u64,
    pub b: f64,
    pub model: CostModelKind,
    pub total_cost: f64,
    pub optimal_cost: f64,
    pub ratio: f64,
}

/// One simulation per minimal width `1..=w_max`, with one-hour solves.
pub fn sweep(b: f64, w_max: u64, e: f64, model: CostModel) -> Result<Vec<IaRow>, AllocationError> {
    let cap = w_max.saturating_mul(b.ceil() as u64 + 1).max(1);
    (1..=w_max)
        .map(|w| {
            let out = ia_total_cost(&SolverProfile::unit(w, e), b, model, cap)?;
            Ok(IaRow {
                w_plus: w,
                b,
                model: model.kind,
                total_cost: out.total_cost,
                optimal_cost: out.optimal_cost,
                ratio: out.ratio,
            })
        })
        .collect()
}

/// Expected cost over expected optimal cost when every listed minimal width
/// is equally likely. This is the average the analytic bound refers to.
pub fn mean_ratio(rows: &[IaRow]) -> f64 {
    let total: f64 = rows.iter().map(|r| r.total_cost).sum();
    let optimal: f64 = rows.iter().map(|r| r.optimal_cost).sum();
    total / optimal
}
