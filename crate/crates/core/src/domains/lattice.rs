//! n-dimensional lattices from the origin to (l₁, …, lₙ). Every move
//! increments a nonempty subset of coordinates by one, so the state space is
//! a DAG; the cost of a move depends only on the subset (bit mask) moved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DomainError;
use crate::hashing::FeatureProjection;
use crate::problem::{Cost, SearchProblem};

#[derive(Clone, Debug)]
pub struct LatticeProblem {
    lengths: Vec<u32>,
    /// Indexed by move mask; entry 0 is unused.
    step_costs: Vec<Cost>,
    min_step: Cost,
}

impl LatticeProblem {
    pub fn new(lengths: Vec<u32>, step_costs: Vec<Cost>) -> Result<Self, DomainError> {
        let n = lengths.len();
        if n == 0 || n > 16 {
            return Err(DomainError::Invalid(format!("unsupported dimension {n}")));
        }
        if step_costs.len() != 1 << n {
            return Err(DomainError::Invalid(format!(
                "expected {} step costs, got {}",
                1usize << n,
                step_costs.len()
            )));
        }
        if step_costs[1..].iter().any(|&c| !c.is_finite() || c < 0.0) {
            return Err(DomainError::Invalid("step costs must be finite and nonnegative".into()));
        }
        let min_step = step_costs[1..].iter().copied().fold(f64::INFINITY, f64::min);
        Ok(LatticeProblem { lengths, step_costs, min_step })
    }

    /// Every move costs 1.
    pub fn uniform(dims: usize, len: u32) -> Self {
        Self::new(vec![len; dims], vec![1.0; 1 << dims]).expect("valid lattice")
    }

    /// Random integer move costs in `1..=2·|mask|`.
    pub fn random(dims: usize, len: u32, seed: u64) -> Result<Self, DomainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let costs = (0..1usize << dims)
            .map(|m| {
                let k = m.count_ones().max(1);
                rng.gen_range(1..=2 * k) as Cost
            })
            .collect();
        Self::new(vec![len; dims], costs)
    }

    pub fn dims(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn step_cost(&self, mask: usize) -> Cost {
        self.step_costs[mask]
    }

    /// All coordinates of the lattice in lexicographic order.
    pub fn all_states(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &l in &self.lengths {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=l).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn axis_offset(&self, axis: usize) -> usize {
        self.lengths[..axis].iter().map(|&l| l as usize + 1).sum()
    }
}

impl SearchProblem for LatticeProblem {
    type State = Vec<u32>;

    fn initial(&self) -> Vec<u32> {
        vec![0; self.dims()]
    }

    fn is_goal(&self, s: &Vec<u32>) -> bool {
        s.as_slice() == self.lengths.as_slice()
    }

    fn expand(&self, s: &Vec<u32>, out: &mut Vec<(Vec<u32>, Cost)>) {
        let free: usize = (0..self.dims())
            .filter(|&i| s[i] < self.lengths[i])
            .fold(0, |m, i| m | (1 << i));
        for mask in 1..(1usize << self.dims()) {
            if mask & !free != 0 {
                continue;
            }
            let mut t = s.clone();
            for (i, v) in t.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *v += 1;
                }
            }
            out.push((t, self.step_costs[mask]));
        }
    }

    /// Every move advances each coordinate by at most one.
    fn heuristic(&self, s: &Vec<u32>) -> Cost {
        let steps = s.iter().zip(&self.lengths).map(|(&x, &l)| l - x).max().unwrap_or(0);
        steps as Cost * self.min_step
    }

    fn feature_count(&self) -> usize {
        self.lengths.iter().map(|&l| l as usize + 1).sum()
    }

    fn features(&self, s: &Vec<u32>, out: &mut Vec<u32>) {
        let mut off = 0u32;
        for (&x, &l) in s.iter().zip(&self.lengths) {
            out.push(off + x);
            off += l + 1;
        }
    }

    fn canonical_bytes(&self, s: &Vec<u32>) -> Vec<u8> {
        s.iter().flat_map(|x| x.to_le_bytes()).collect()
    }

    /// Coordinates halved: (axis, x) ↦ (axis, x ÷ 2).
    fn default_projection(&self) -> FeatureProjection {
        let mut map = Vec::with_capacity(self.feature_count());
        let mut abstract_off = 0u32;
        for (axis, &l) in self.lengths.iter().enumerate() {
            debug_assert_eq!(map.len(), self.axis_offset(axis));
            for x in 0..=l {
                map.push(abstract_off + x / 2);
            }
            abstract_off += l / 2 + 1;
        }
        FeatureProjection::new(map, abstract_off as usize).expect("projection in range")
    }

    fn lattice_coords(&self, s: &Vec<u32>) -> Option<Vec<u64>> {
        Some(s.iter().map(|&x| x as u64).collect())
    }
}
