//! Gridmaps with 4- or 8-connectivity and the octile heuristic.
//!
//! Text format: a header line `width height connectivity`, then `height` rows
//! of `width` characters, `.` traversable and `#` blocked.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DomainError;
use crate::hashing::FeatureProjection;
use crate::problem::{Cost, SearchProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub fn new(x: u32, y: u32) -> Self {
        Cell { x, y }
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    open: Vec<bool>,
    connectivity: Connectivity,
}

impl GridMap {
    pub fn new(width: usize, height: usize, connectivity: Connectivity) -> Self {
        GridMap { width, height, open: vec![true; width * height], connectivity }
    }

    pub fn parse(text: &str) -> Result<GridMap, DomainError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| DomainError::parse(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(DomainError::parse(1, "header must be `width height connectivity`"));
        }
        let dim = |s: &str| -> Result<usize, DomainError> {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| DomainError::parse(1, format!("bad dimension `{s}`")))
        };
        let (width, height) = (dim(fields[0])?, dim(fields[1])?);
        let connectivity = match fields[2] {
            "4" => Connectivity::Four,
            "8" => Connectivity::Eight,
            other => {
                return Err(DomainError::parse(1, format!("connectivity must be 4 or 8, got `{other}`")))
            }
        };
        let mut open = Vec::with_capacity(width * height);
        let mut rows = 0;
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.trim_end_matches('\r');
            if rows == height {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(DomainError::parse(lineno, "more rows than the declared height"));
            }
            if line.chars().count() != width {
                return Err(DomainError::parse(
                    lineno,
                    format!("row has {} cells, expected {width}", line.chars().count()),
                ));
            }
            for ch in line.chars() {
                match ch {
                    '.' => open.push(true),
                    '#' => open.push(false),
                    other => {
                        return Err(DomainError::parse(lineno, format!("illegal character `{other}`")))
                    }
                }
            }
            rows += 1;
        }
        if rows != height {
            return Err(DomainError::parse(rows + 2, format!("expected {height} rows, found {rows}")));
        }
        Ok(GridMap { width, height, open, connectivity })
    }

    /// Random map where each cell is blocked with probability `density`.
    /// The corners (0,0) and (w−1,h−1) are always left open.
    pub fn random(width: usize, height: usize, density: f64, connectivity: Connectivity, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map = GridMap::new(width, height, connectivity);
        for v in map.open.iter_mut() {
            *v = !rng.gen_bool(density.clamp(0.0, 1.0));
        }
        map.open[0] = true;
        map.open[width * height - 1] = true;
        map
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn is_open(&self, c: Cell) -> bool {
        (c.x as usize) < self.width
            && (c.y as usize) < self.height
            && self.open[c.y as usize * self.width + c.x as usize]
    }

    pub fn set_blocked(&mut self, c: Cell, blocked: bool) {
        let i = c.y as usize * self.width + c.x as usize;
        self.open[i] = !blocked;
    }

    /// Traversable neighbours of `c`; diagonal steps cost √2.
    pub fn neighbors(&self, c: Cell, out: &mut Vec<(Cell, Cost)>) {
        const STRAIGHT: [(i64, i64); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];
        const DIAGONAL: [(i64, i64); 4] = [(-1, -1), (1, -1), (-1, 1), (1, 1)];
        let mut push = |dx: i64, dy: i64, cost: Cost| {
            let (nx, ny) = (c.x as i64 + dx, c.y as i64 + dy);
            if self.in_bounds(nx, ny) {
                let n = Cell::new(nx as u32, ny as u32);
                if self.is_open(n) {
                    out.push((n, cost));
                }
            }
        };
        for (dx, dy) in STRAIGHT {
            push(dx, dy, 1.0);
        }
        if self.connectivity == Connectivity::Eight {
            for (dx, dy) in DIAGONAL {
                push(dx, dy, std::f64::consts::SQRT_2);
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {}\n",
            self.width,
            self.height,
            if self.connectivity == Connectivity::Eight { 8 } else { 4 }
        );
        for row in self.open.chunks(self.width) {
            s.extend(row.iter().map(|&o| if o { '.' } else { '#' }));
            s.push('\n');
        }
        s
    }
}

/// Octile distance (8-connected) or Manhattan distance (4-connected).
pub fn octile_h(a: Cell, b: Cell, connectivity: Connectivity) -> Cost {
    let dx = a.x.abs_diff(b.x) as Cost;
    let dy = a.y.abs_diff(b.y) as Cost;
    match connectivity {
        Connectivity::Eight => std::f64::consts::SQRT_2 * dx.min(dy) + (dx - dy).abs(),
        Connectivity::Four => dx + dy,
    }
}

/// Point-to-point search on a gridmap.
#[derive(Clone, Debug)]
pub struct GridProblem {
    map: Arc<GridMap>,
    start: Cell,
    goal: Cell,
    /// Side of the square blocks used by the abstraction-based owner function.
    block: u32,
    /// Side of the blocks used by the default AZH projection.
    projection_block: u32,
}

impl GridProblem {
    pub fn new(map: impl Into<Arc<GridMap>>, start: Cell, goal: Cell) -> Result<Self, DomainError> {
        let map = map.into();
        if !map.is_open(start) {
            return Err(DomainError::StartBlocked);
        }
        if !map.is_open(goal) {
            return Err(DomainError::GoalBlocked);
        }
        Ok(GridProblem { map, start, goal, block: 4, projection_block: 2 })
    }

    /// Start at the top-left corner, goal at the bottom-right corner.
    pub fn corner_to_corner(map: impl Into<Arc<GridMap>>) -> Result<Self, DomainError> {
        let map = map.into();
        let goal = Cell::new(map.width() as u32 - 1, map.height() as u32 - 1);
        GridProblem::new(map, Cell::new(0, 0), goal)
    }

    pub fn with_block(mut self, k: u32) -> Self {
        self.block = k.max(1);
        self
    }

    pub fn with_projection_block(mut self, k: u32) -> Self {
        self.projection_block = k.max(1);
        self
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    fn block_counts(&self, k: u32) -> (usize, usize) {
        (self.map.width().div_ceil(k as usize), self.map.height().div_ceil(k as usize))
    }
}

impl SearchProblem for GridProblem {
    type State = Cell;

    fn initial(&self) -> Cell {
        self.start
    }

    fn is_goal(&self, s: &Cell) -> bool {
        *s == self.goal
    }

    fn expand(&self, s: &Cell, out: &mut Vec<(Cell, Cost)>) {
        self.map.neighbors(*s, out);
    }

    fn heuristic(&self, s: &Cell) -> Cost {
        octile_h(*s, self.goal, self.map.connectivity())
    }

    fn feature_count(&self) -> usize {
        self.map.width() + self.map.height()
    }

    fn features(&self, s: &Cell, out: &mut Vec<u32>) {
        out.push(s.x);
        out.push(self.map.width() as u32 + s.y);
    }

    fn canonical_bytes(&self, s: &Cell) -> Vec<u8> {
        let mut b = s.x.to_le_bytes().to_vec();
        b.extend_from_slice(&s.y.to_le_bytes());
        b
    }

    fn abstraction_feature_count(&self) -> usize {
        let (bx, by) = self.block_counts(self.block);
        bx + by
    }

    fn abstract_features(&self, s: &Cell, out: &mut Vec<u32>) {
        let (bx, _) = self.block_counts(self.block);
        out.push(s.x / self.block);
        out.push(bx as u32 + s.y / self.block);
    }

    fn default_projection(&self) -> FeatureProjection {
        let k = self.projection_block as usize;
        let w = self.map.width();
        let (bx, by) = self.block_counts(self.projection_block);
        let map = (0..self.feature_count())
            .map(|f| if f < w { (f / k) as u32 } else { (bx + (f - w) / k) as u32 })
            .collect();
        FeatureProjection::new(map, bx + by).expect("projection in range")
    }

    fn lattice_coords(&self, s: &Cell) -> Option<Vec<u64>> {
        Some(vec![s.x as u64, s.y as u64])
    }
}
