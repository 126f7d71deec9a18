//! Concrete state spaces and their admissible heuristics.

pub mod graph;
pub mod grid;
pub mod lattice;
pub mod tile;

pub use graph::ExplicitGraph;
pub use grid::{Cell, Connectivity, GridMap, GridProblem};
pub use lattice::LatticeProblem;
pub use tile::{TilePuzzle, TileState};

use thiserror::Error;

/// Error raised while reading an instance file or building a problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("start blocked")]
    StartBlocked,
    #[error("goal blocked")]
    GoalBlocked,
    #[error("{0}")]
    Invalid(String),
}

impl DomainError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        DomainError::Parse { line, msg: msg.into() }
    }
}

/// Parses generator specs of the form `"n=3,seed=7"`.
pub fn parse_gen_spec(spec: &str) -> Result<Vec<(String, String)>, DomainError> {
    spec.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| DomainError::Invalid(format!("expected key=value, got `{part}`")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

pub fn gen_value<T: std::str::FromStr>(
    pairs: &[(String, String)],
    key: &str,
    default: Option<T>,
) -> Result<T, DomainError> {
    match pairs.iter().find(|(k, _)| k == key) {
        Some((_, v)) => v
            .parse()
            .map_err(|_| DomainError::Invalid(format!("bad value for `{key}`: `{v}`"))),
        None => default.ok_or_else(|| DomainError::Invalid(format!("missing `{key}`"))),
    }
}
