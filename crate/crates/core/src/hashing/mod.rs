//! Work distribution: functions mapping a state to the worker that owns it.

mod owners;
mod strategy;
mod zobrist;

pub use owners::{hyperplane_owner, kappa_fold, mult_owner, random_owner, Multiplier, Thickness, GOLDEN_A};
pub use strategy::{Distributor, HashConfig, OwnerFn, StrategyKind};
pub use zobrist::{azh_key, FeatureProjection, ZobristTable};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HashError {
    #[error("feature {feature} outside a table of {size} entries")]
    UnknownFeature { feature: u32, size: usize },
    #[error("invalid hyperplane thickness `{0}`")]
    BadThickness(String),
    #[error("unknown hash strategy `{0}` (expected zobrist|azh|mult|abstraction|hyperplane|random)")]
    UnknownStrategy(String),
    #[error("{0}")]
    Config(String),
}
