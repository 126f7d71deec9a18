use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HashError;

/// One random 64-bit string per feature id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZobristTable {
    bits: Vec<u64>,
    seed: u64,
}

impl ZobristTable {
    pub fn new(features: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = (0..features).map(|_| rng.next_u64()).collect();
        ZobristTable { bits, seed }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn get(&self, feature: u32) -> Result<u64, HashError> {
        self.bits
            .get(feature as usize)
            .copied()
            .ok_or(HashError::UnknownFeature { feature, size: self.bits.len() })
    }

    /// XOR of the strings of every feature.
    pub fn key(&self, features: &[u32]) -> Result<u64, HashError> {
        features.iter().try_fold(0u64, |k, &f| Ok(k ^ self.get(f)?))
    }

    /// Incremental form of [`key`](Self::key): XOR out the removed features
    /// and XOR in the added ones.
    pub fn update(&self, key: u64, removed: &[u32], added: &[u32]) -> Result<u64, HashError> {
        let k = self.key(removed)?;
        Ok(key ^ k ^ self.key(added)?)
    }
}

/// Many-to-one mapping from feature ids to abstract feature ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureProjection {
    map: Vec<u32>,
    abstract_count: usize,
}

impl FeatureProjection {
    pub fn new(map: Vec<u32>, abstract_count: usize) -> Result<Self, HashError> {
        if let Some(&bad) = map.iter().find(|&&a| a as usize >= abstract_count) {
            return Err(HashError::UnknownFeature { feature: bad, size: abstract_count });
        }
        Ok(FeatureProjection { map, abstract_count })
    }

    pub fn identity(features: usize) -> Self {
        FeatureProjection { map: (0..features as u32).collect(), abstract_count: features }
    }

    /// Every feature to abstract feature 0.
    pub fn collapse(features: usize) -> Self {
        FeatureProjection { map: vec![0; features], abstract_count: 1 }
    }

    pub fn feature_count(&self) -> usize {
        self.map.len()
    }

    pub fn abstract_count(&self) -> usize {
        self.abstract_count
    }

    #[inline]
    pub fn project(&self, feature: u32) -> Result<u32, HashError> {
        self.map
            .get(feature as usize)
            .copied()
            .ok_or(HashError::UnknownFeature { feature, size: self.map.len() })
    }
}

/// Abstract Zobrist key: XOR of the strings of the projected features.
pub fn azh_key(table: &ZobristTable, proj: &FeatureProjection, features: &[u32]) -> Result<u64, HashError> {
    features
        .iter()
        .try_fold(0u64, |k, &f| Ok(k ^ table.get(proj.project(f)?)?))
}
