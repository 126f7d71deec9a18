use std::fmt::Debug;
use std::hash::Hash;

use crate::hashing::FeatureProjection;

/// Edge and path costs.
pub type Cost = f64;

/// Tolerance used whenever two costs or f-values are compared for equality.
pub const COST_EPS: Cost = 1e-9;

/// An implicit state-space graph: initial state, goal test, successor
/// generator and heuristic, plus the feature view used by the hash-based
/// work distributors.
///
/// Feature ids lie in `0..feature_count()` and the feature multiset must
/// identify a state uniquely.
pub trait SearchProblem: Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync + 'static;

    fn initial(&self) -> Self::State;

    fn is_goal(&self, s: &Self::State) -> bool;

    /// Appends `(successor, edge cost)` pairs to `out`. Costs are nonnegative.
    fn expand(&self, s: &Self::State, out: &mut Vec<(Self::State, Cost)>);

    fn heuristic(&self, s: &Self::State) -> Cost;

    fn feature_count(&self) -> usize;

    fn features(&self, s: &Self::State, out: &mut Vec<u32>);

    /// Features removed and added when moving from `from` to its successor `to`.
    fn feature_delta(
        &self,
        from: &Self::State,
        to: &Self::State,
        removed: &mut Vec<u32>,
        added: &mut Vec<u32>,
    ) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        self.features(from, &mut a);
        self.features(to, &mut b);
        a.sort_unstable();
        b.sort_unstable();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    removed.push(*x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    added.push(*y);
                    j += 1;
                }
                (Some(x), None) => {
                    removed.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    added.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
    }

    /// Canonical byte serialization of a state.
    fn canonical_bytes(&self, s: &Self::State) -> Vec<u8>;

    /// Size of the feature universe of the coarse abstraction used by the
    /// abstraction-based owner function.
    fn abstraction_feature_count(&self) -> usize {
        self.feature_count()
    }

    /// Features of the abstract state; states with equal abstract features
    /// always share an owner.
    fn abstract_features(&self, s: &Self::State, out: &mut Vec<u32>) {
        self.features(s, out)
    }

    /// Default feature projection for abstract Zobrist hashing.
    fn default_projection(&self) -> FeatureProjection {
        FeatureProjection::identity(self.feature_count())
    }

    /// Lattice coordinates, for domains where hyperplane distribution applies.
    fn lattice_coords(&self, _s: &Self::State) -> Option<Vec<u64>> {
        None
    }
}

/// Checks that `path` starts at the initial state, ends at a goal, and that
/// every step is an edge of the problem. Returns the summed edge cost.
pub fn validate_path<P: SearchProblem>(problem: &P, path: &[P::State]) -> Result<Cost, String> {
    let first = path.first().ok_or("empty path")?;
    if *first != problem.initial() {
        return Err("path does not start at the initial state".into());
    }
    let last = path.last().unwrap();
    if !problem.is_goal(last) {
        return Err("path does not end at a goal".into());
    }
    let mut total = 0.0;
    let mut succ = Vec::new();
    for (i, pair) in path.windows(2).enumerate() {
        succ.clear();
        problem.expand(&pair[0], &mut succ);
        let step = succ
            .iter()
            .filter(|(s, _)| *s == pair[1])
            .map(|&(_, c)| c)
            .fold(f64::INFINITY, f64::min);
        if !step.is_finite() {
            return Err(format!("step {i} is not an edge"));
        }
        total += step;
    }
    Ok(total)
}
