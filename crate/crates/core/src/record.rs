//! Machine-readable records of single runs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::parallel::{TerminationReport, WorkerStats};
use crate::problem::Cost;
use crate::serial::SearchStats;

pub const SCHEMA_VERSION: u32 = 1;

/// Serializes a cost as a JSON number, or the string `"inf"` when no
/// solution exists.
pub fn serialize_cost<S: Serializer>(cost: &Cost, s: S) -> Result<S::Ok, S::Error> {
    if cost.is_finite() {
        s.serialize_f64(*cost)
    } else {
        s.serialize_str("inf")
    }
}

pub fn deserialize_cost<'de, D: Deserializer<'de>>(d: D) -> Result<Cost, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("bad cost `{t}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub instance: String,
    pub algorithm: String,
    /// Distribution strategy; empty for engines without one.
    pub strategy: String,
    pub workers: usize,
    #[serde(serialize_with = "serialize_cost", deserialize_with = "deserialize_cost")]
    pub cost: Cost,
    pub solved: bool,
    /// Number of states on the returned path, start and goal included.
    pub path_length: usize,
    pub expanded: u64,
    pub generated: u64,
    pub reopened: u64,
    pub wall_time: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<TerminationReport>,
    /// Winning weight of a dovetailing run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    pub possibly_suboptimal: bool,
    pub per_worker: Vec<WorkerStats>,
}

impl RunRecord {
    pub fn new(instance: impl Into<String>, algorithm: impl Into<String>, cost: Cost, stats: &SearchStats) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            instance: instance.into(),
            algorithm: algorithm.into(),
            strategy: String::new(),
            workers: 1,
            cost,
            solved: cost.is_finite(),
            path_length: 0,
            expanded: stats.expanded,
            generated: stats.generated,
            reopened: stats.reopened,
            wall_time: stats.wall_time,
            seed: 0,
            termination: None,
            weight: None,
            possibly_suboptimal: false,
            per_worker: Vec::new(),
        }
    }
}
