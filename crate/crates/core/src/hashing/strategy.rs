use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::owners::{hyperplane_owner, kappa_fold, random_owner, Multiplier, Thickness, GOLDEN_A};
use super::zobrist::{azh_key, FeatureProjection, ZobristTable};
use super::HashError;
use crate::problem::SearchProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Zobrist,
    Azh,
    Mult,
    Abstraction,
    Hyperplane,
    Random,
    /// Caller-supplied owner function.
    Custom,
}

impl StrategyKind {
    pub const SELECTABLE: [StrategyKind; 6] = [
        StrategyKind::Zobrist,
        StrategyKind::Azh,
        StrategyKind::Mult,
        StrategyKind::Abstraction,
        StrategyKind::Hyperplane,
        StrategyKind::Random,
    ];

    pub fn token(self) -> &'static str {
        match self {
            StrategyKind::Zobrist => "zobrist",
            StrategyKind::Azh => "azh",
            StrategyKind::Mult => "mult",
            StrategyKind::Abstraction => "abstraction",
            StrategyKind::Hyperplane => "hyperplane",
            StrategyKind::Random => "random",
            StrategyKind::Custom => "custom",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for StrategyKind {
    type Err = HashError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::SELECTABLE
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| HashError::UnknownStrategy(s.to_string()))
    }
}

/// Key-value configuration for the distributors and the domain abstractions
/// they rely on. Every field is optional in the TOML form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HashConfig {
    /// Seed of the Zobrist bit-string generator.
    pub seed: u64,
    /// Multiplier of the multiplicative hash.
    pub mult_a: f64,
    /// Hyperplane thickness, `"2"` or `"1/2"`.
    pub hyperplane_d: String,
    /// Tiles kept by the tile abstraction.
    pub tile_abstraction: Vec<u8>,
    /// Rows per position block in the tile AZH projection.
    pub tile_projection_rows: usize,
    /// Block side of the grid abstraction.
    pub grid_block: u32,
    /// Block side of the grid AZH projection.
    pub grid_projection_block: u32,
}

impl Default for HashConfig {
    fn default() -> Self {
        HashConfig {
            seed: 42,
            mult_a: GOLDEN_A,
            hyperplane_d: "1".into(),
            tile_abstraction: vec![1, 2, 3],
            tile_projection_rows: 2,
            grid_block: 4,
            grid_projection_block: 2,
        }
    }
}

impl HashConfig {
    pub fn from_toml(text: &str) -> Result<Self, HashError> {
        toml::from_str(text).map_err(|e| HashError::Config(e.to_string()))
    }

    pub fn thickness(&self) -> Result<Thickness, HashError> {
        self.hyperplane_d.parse()
    }
}

pub type OwnerFn<S> = Arc<dyn Fn(&S, usize) -> usize + Send + Sync>;

/// A configured work-distribution strategy for one problem.
#[derive(Clone)]
pub struct Distributor<S> {
    kind: StrategyKind,
    table: ZobristTable,
    aux_table: Option<ZobristTable>,
    projection: Option<FeatureProjection>,
    multiplier: Multiplier,
    thickness: Thickness,
    custom: Option<OwnerFn<S>>,
}

impl<S> fmt::Debug for Distributor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distributor")
            .field("kind", &self.kind)
            .field("seed", &self.table.seed())
            .field("thickness", &self.thickness)
            .finish()
    }
}

impl<S: Clone + 'static> Distributor<S> {
    pub fn new<P>(problem: &P, kind: StrategyKind, cfg: &HashConfig) -> Result<Self, HashError>
    where
        P: SearchProblem<State = S>,
    {
        let table = ZobristTable::new(problem.feature_count(), cfg.seed);
        let mut projection = None;
        let aux_table = match kind {
            StrategyKind::Azh => {
                let proj = problem.default_projection();
                if proj.feature_count() != problem.feature_count() {
                    return Err(HashError::Config("projection does not cover the feature universe".into()));
                }
                let t = ZobristTable::new(proj.abstract_count(), cfg.seed ^ 0xA2B1_0000);
                projection = Some(proj);
                Some(t)
            }
            StrategyKind::Abstraction => {
                Some(ZobristTable::new(problem.abstraction_feature_count(), cfg.seed ^ 0xAB57_0000))
            }
            StrategyKind::Hyperplane => {
                if problem.lattice_coords(&problem.initial()).is_none() {
                    return Err(HashError::Config("hyperplane distribution needs lattice coordinates".into()));
                }
                None
            }
            StrategyKind::Custom => {
                return Err(HashError::Config("use Distributor::custom for caller-supplied owners".into()))
            }
            _ => None,
        };
        Ok(Distributor {
            kind,
            table,
            aux_table,
            projection,
            multiplier: Multiplier::new(cfg.mult_a)?,
            thickness: cfg.thickness()?,
            custom: None,
        })
    }

    pub fn custom(owner: impl Fn(&S, usize) -> usize + Send + Sync + 'static) -> Self {
        Distributor {
            kind: StrategyKind::Custom,
            table: ZobristTable::new(0, 0),
            aux_table: None,
            projection: None,
            multiplier: Multiplier::golden(),
            thickness: Thickness::Whole(1),
            custom: Some(Arc::new(owner)),
        }
    }

    /// Zobrist distributor with a fixed projection table, for tests and tools
    /// that need an explicit [`FeatureProjection`].
    pub fn with_projection<P>(problem: &P, projection: FeatureProjection, seed: u64) -> Result<Self, HashError>
    where
        P: SearchProblem<State = S>,
    {
        let mut d = Distributor::new(problem, StrategyKind::Zobrist, &HashConfig { seed, ..Default::default() })?;
        d.kind = StrategyKind::Azh;
        d.aux_table = Some(ZobristTable::new(projection.abstract_count(), seed ^ 0xA2B1_0000));
        d.projection = Some(projection);
        Ok(d)
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn table(&self) -> &ZobristTable {
        &self.table
    }

    pub fn thickness(&self) -> Thickness {
        self.thickness
    }

    /// Whether the owner is a pure function of the state.
    pub fn is_deterministic(&self) -> bool {
        self.kind != StrategyKind::Random
    }

    /// The 64-bit key the owner is derived from; `None` for strategies that
    /// pick owners without a key (random, custom).
    pub fn key<P>(&self, problem: &P, s: &S, scratch: &mut Vec<u32>) -> Option<u64>
    where
        P: SearchProblem<State = S>,
    {
        scratch.clear();
        let key = match self.kind {
            StrategyKind::Zobrist | StrategyKind::Hyperplane => {
                problem.features(s, scratch);
                self.table.key(scratch)
            }
            StrategyKind::Azh => {
                problem.features(s, scratch);
                azh_key(self.aux_table.as_ref()?, self.projection.as_ref()?, scratch)
            }
            StrategyKind::Abstraction => {
                problem.abstract_features(s, scratch);
                self.aux_table.as_ref()?.key(scratch)
            }
            StrategyKind::Mult => Ok(kappa_fold(&problem.canonical_bytes(s))),
            StrategyKind::Random | StrategyKind::Custom => return None,
        };
        Some(key.expect("problem features lie inside the table"))
    }

    /// Owner worker of `s` among `p` workers. `rng` is only consulted by the
    /// random strategy.
    pub fn owner<P>(&self, problem: &P, s: &S, p: usize, rng: &mut ChaCha8Rng, scratch: &mut Vec<u32>) -> usize
    where
        P: SearchProblem<State = S>,
    {
        if p <= 1 {
            return 0;
        }
        match self.kind {
            StrategyKind::Random => random_owner(rng, p),
            StrategyKind::Custom => self.custom.as_ref().expect("custom owner")(s, p) % p,
            StrategyKind::Mult => self.multiplier.owner(self.key(problem, s, scratch).unwrap(), p),
            StrategyKind::Hyperplane => {
                let z = self.key(problem, s, scratch).unwrap();
                let coords = problem.lattice_coords(s).expect("checked at construction");
                hyperplane_owner(&coords, self.thickness, p, z)
                    .expect("thickness validated by check_workers")
            }
            _ => (self.key(problem, s, scratch).unwrap() % p as u64) as usize,
        }
    }

    /// Rejects configurations that cannot serve `p` workers.
    pub fn check_workers(&self, p: usize) -> Result<(), HashError> {
        if let (StrategyKind::Hyperplane, Thickness::Fraction(m)) = (self.kind, self.thickness) {
            if m as usize > p && p > 1 {
                return Err(HashError::BadThickness(format!("1/{m} with only {p} workers")));
            }
        }
        Ok(())
    }
}
