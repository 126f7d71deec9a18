//! The n×n sliding-tile puzzle. The goal places the blank (0) at the top-left
//! corner followed by tiles 1..n²−1 in row-major order.

use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DomainError;
use crate::hashing::FeatureProjection;
use crate::problem::{Cost, SearchProblem};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TileState {
    width: u8,
    blank: u8,
    cells: Box<[u8]>,
}

impl TileState {
    pub fn new(width: usize, cells: Vec<u8>) -> Result<Self, DomainError> {
        if !(2..=15).contains(&width) {
            return Err(DomainError::Invalid(format!("unsupported width {width}")));
        }
        let n = width * width;
        if cells.len() != n {
            return Err(DomainError::Invalid(format!(
                "expected {n} cells, got {}",
                cells.len()
            )));
        }
        let mut seen = vec![false; n];
        for &c in &cells {
            let c = c as usize;
            if c >= n || seen[c] {
                return Err(DomainError::Invalid("cells are not a permutation".into()));
            }
            seen[c] = true;
        }
        let blank = cells.iter().position(|&c| c == 0).unwrap() as u8;
        Ok(TileState { width: width as u8, blank, cells: cells.into_boxed_slice() })
    }

    pub fn goal(width: usize) -> Self {
        let cells: Vec<u8> = (0..(width * width) as u8).collect();
        TileState::new(width, cells).expect("goal is a permutation")
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn blank_pos(&self) -> usize {
        self.blank as usize
    }

    pub fn is_goal(&self) -> bool {
        self.cells.iter().enumerate().all(|(i, &c)| c as usize == i)
    }

    /// Successor states, one per legal blank move, in the order up, down,
    /// left, right.
    pub fn successors(&self) -> Vec<TileState> {
        let w = self.width();
        let b = self.blank_pos();
        let (r, c) = (b / w, b % w);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.swap_blank(b - w));
        }
        if r + 1 < w {
            out.push(self.swap_blank(b + w));
        }
        if c > 0 {
            out.push(self.swap_blank(b - 1));
        }
        if c + 1 < w {
            out.push(self.swap_blank(b + 1));
        }
        out
    }

    fn swap_blank(&self, to: usize) -> TileState {
        let mut cells = self.cells.clone();
        cells.swap(self.blank as usize, to);
        TileState { width: self.width, blank: to as u8, cells }
    }

    /// Sum of Manhattan distances of the non-blank tiles to their goal cells.
    pub fn manhattan(&self) -> u32 {
        let w = self.width();
        self.cells
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t != 0)
            .map(|(pos, &t)| {
                let t = t as usize;
                ((pos / w).abs_diff(t / w) + (pos % w).abs_diff(t % w)) as u32
            })
            .sum()
    }

    /// Whether the state lies in the half of the permutation space reachable
    /// from the goal: permutation parity must equal the parity of the blank's
    /// distance from its goal cell.
    pub fn is_solvable(&self) -> bool {
        let w = self.width();
        let mut seen = vec![false; self.cells.len()];
        let mut transpositions = 0;
        for start in 0..self.cells.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.cells[i] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        let b = self.blank_pos();
        let blank_dist = b / w + b % w;
        transpositions % 2 == blank_dist % 2
    }

    /// A uniformly random state from the solvable half.
    pub fn random_solvable(width: usize, seed: u64) -> TileState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_solvable_with(width, &mut rng)
    }

    pub fn random_solvable_with<R: Rng>(width: usize, rng: &mut R) -> TileState {
        let mut cells: Vec<u8> = (0..(width * width) as u8).collect();
        cells.shuffle(rng);
        let mut s = TileState::new(width, cells).expect("shuffled permutation");
        if !s.is_solvable() {
            // Swapping two non-blank tiles flips parity: a bijection between halves.
            let (i, j) = {
                let mut it = (0..s.cells.len()).filter(|&k| s.cells[k] != 0);
                (it.next().unwrap(), it.next().unwrap())
            };
            s.cells.swap(i, j);
        }
        s
    }

    /// State reached by `steps` random blank moves from the goal, never
    /// undoing the previous move.
    pub fn random_walk(width: usize, steps: usize, seed: u64) -> TileState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = TileState::goal(width);
        let mut prev: Option<usize> = None;
        for _ in 0..steps {
            let succ: Vec<TileState> = s
                .successors()
                .into_iter()
                .filter(|t| Some(t.blank_pos()) != prev)
                .collect();
            prev = Some(s.blank_pos());
            s = succ.choose(&mut rng).unwrap().clone();
        }
        s
    }

    /// Parses `n` followed by n² whitespace-separated cell values.
    pub fn parse(text: &str) -> Result<TileState, DomainError> {
        let mut nums = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap();
            for tok in line.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| DomainError::parse(lineno + 1, format!("not a number: `{tok}`")))?;
                nums.push(v);
            }
        }
        let (&n, rest) = nums
            .split_first()
            .ok_or_else(|| DomainError::parse(1, "empty tile instance"))?;
        if rest.iter().any(|&v| v > u8::MAX as usize) {
            return Err(DomainError::Invalid("cell value out of range".into()));
        }
        TileState::new(n, rest.iter().map(|&v| v as u8).collect())
    }
}

impl fmt::Debug for TileState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tile{:?}", &self.cells[..])
    }
}

impl fmt::Display for TileState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.width();
        for (i, row) in self.cells.chunks(w).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let row: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Number of states reachable from the goal: (n²)!/2.
pub fn tile_state_count(width: usize) -> BigUint {
    let n = width * width;
    let fact = (1..=n as u64).fold(BigUint::from(1u32), |acc, k| acc * k);
    fact / 2u32
}

/// Sliding-tile search problem with the Manhattan-distance heuristic.
#[derive(Clone, Debug)]
pub struct TilePuzzle {
    start: TileState,
    /// Tiles kept by the abstraction-based owner function.
    abstraction_tiles: Vec<u8>,
    /// Rows grouped into one position block by the default AZH projection.
    projection_rows: usize,
}

impl TilePuzzle {
    pub fn new(start: TileState) -> Self {
        TilePuzzle { start, abstraction_tiles: vec![1, 2, 3], projection_rows: 2 }
    }

    pub fn with_abstraction_tiles(mut self, tiles: Vec<u8>) -> Self {
        self.abstraction_tiles = tiles;
        self
    }

    pub fn with_projection_rows(mut self, rows: usize) -> Self {
        self.projection_rows = rows.max(1);
        self
    }

    pub fn start(&self) -> &TileState {
        &self.start
    }

    pub fn width(&self) -> usize {
        self.start.width()
    }

    fn cells(&self) -> usize {
        self.width() * self.width()
    }

    #[inline]
    pub fn feature_id(&self, tile: u8, pos: usize) -> u32 {
        (tile as usize * self.cells() + pos) as u32
    }
}

impl SearchProblem for TilePuzzle {
    type State = TileState;

    fn initial(&self) -> TileState {
        self.start.clone()
    }

    fn is_goal(&self, s: &TileState) -> bool {
        s.is_goal()
    }

    fn expand(&self, s: &TileState, out: &mut Vec<(TileState, Cost)>) {
        out.extend(s.successors().into_iter().map(|t| (t, 1.0)));
    }

    fn heuristic(&self, s: &TileState) -> Cost {
        s.manhattan() as Cost
    }

    fn feature_count(&self) -> usize {
        self.cells() * self.cells()
    }

    fn features(&self, s: &TileState, out: &mut Vec<u32>) {
        out.extend(s.cells.iter().enumerate().map(|(pos, &t)| self.feature_id(t, pos)));
    }

    fn feature_delta(
        &self,
        from: &TileState,
        to: &TileState,
        removed: &mut Vec<u32>,
        added: &mut Vec<u32>,
    ) {
        let (a, b) = (from.blank_pos(), to.blank_pos());
        let tile = from.cells[b];
        removed.extend([self.feature_id(tile, b), self.feature_id(0, a)]);
        added.extend([self.feature_id(tile, a), self.feature_id(0, b)]);
    }

    fn canonical_bytes(&self, s: &TileState) -> Vec<u8> {
        s.cells.to_vec()
    }

    fn abstract_features(&self, s: &TileState, out: &mut Vec<u32>) {
        for (pos, &t) in s.cells.iter().enumerate() {
            if self.abstraction_tiles.contains(&t) {
                out.push(self.feature_id(t, pos));
            }
        }
    }

    /// (tile, position) ↦ (tile, block of `projection_rows` board rows).
    fn default_projection(&self) -> FeatureProjection {
        let w = self.width();
        let cells = self.cells();
        let blocks = w.div_ceil(self.projection_rows);
        let map = (0..cells * cells)
            .map(|f| {
                let (tile, pos) = (f / cells, f % cells);
                (tile * blocks + (pos / w) / self.projection_rows) as u32
            })
            .collect();
        FeatureProjection::new(map, cells * blocks).expect("projection in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_and_center_branching() {
        let goal = TileState::goal(3);
        assert_eq!(goal.successors().len(), 2);
        let center = TileState::new(3, vec![1, 2, 3, 4, 0, 5, 6, 7, 8]).unwrap();
        assert_eq!(center.successors().len(), 4);
    }

    #[test]
    fn moves_are_reversible() {
        let s = TileState::random_solvable(4, 3);
        for t in s.successors() {
            assert!(t.successors().contains(&s));
            let diff = s.cells().iter().zip(t.cells()).filter(|(a, b)| a != b).count();
            assert_eq!(diff, 2);
        }
    }

    #[test]
    fn manhattan_values() {
        assert_eq!(TileState::goal(4).manhattan(), 0);
        let one = TileState::new(3, vec![1, 0, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        assert_eq!(one.manhattan(), 1);
    }

    #[test]
    fn state_counts() {
        assert_eq!(tile_state_count(2), BigUint::from(12u32));
        assert_eq!(tile_state_count(3), BigUint::from(181_440u32));
        assert_eq!(
            tile_state_count(5).to_string(),
            "7755605021665492992000000"
        );
    }

    #[test]
    fn random_is_deterministic_and_solvable() {
        assert_eq!(TileState::random_solvable(4, 9), TileState::random_solvable(4, 9));
        for seed in 0..200 {
            assert!(TileState::random_solvable(4, seed).is_solvable());
        }
    }

    #[test]
    fn solvability_matches_single_moves() {
        let s = TileState::random_walk(3, 31, 5);
        assert!(s.is_solvable());
        let mut cells = s.cells().to_vec();
        let i = cells.iter().position(|&c| c == 1).unwrap();
        let j = cells.iter().position(|&c| c == 2).unwrap();
        cells.swap(i, j);
        assert!(!TileState::new(3, cells).unwrap().is_solvable());
    }

    #[test]
    fn parse_rejects_bad_permutations() {
        assert!(TileState::parse("2\n0 1 2 3").is_ok());
        assert!(TileState::parse("2\n0 1 1 3").is_err());
        assert!(TileState::parse("3\n0 1 2").is_err());
        assert!(TileState::parse("x").is_err());
    }

    #[test]
    fn delta_matches_feature_difference() {
        let p = TilePuzzle::new(TileState::random_solvable(3, 1));
        let s = p.initial();
        for t in s.successors() {
            let (mut r, mut a) = (vec![], vec![]);
            p.feature_delta(&s, &t, &mut r, &mut a);
            let (mut r2, mut a2) = (vec![], vec![]);
            let generic = |from: &TileState, to: &TileState, r: &mut Vec<u32>, a: &mut Vec<u32>| {
                let mut fa = vec![];
                let mut fb = vec![];
                p.features(from, &mut fa);
                p.features(to, &mut fb);
                r.extend(fa.iter().filter(|f| !fb.contains(f)));
                a.extend(fb.iter().filter(|f| !fa.contains(f)));
            };
            generic(&s, &t, &mut r2, &mut a2);
            r.sort();
            a.sort();
            r2.sort();
            a2.sort();
            assert_eq!((r, a), (r2, a2));
        }
    }
}
