use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use parsearch_core::domains::{
    gen_value, parse_gen_spec, Cell, Connectivity, ExplicitGraph, GridMap, GridProblem, LatticeProblem, TilePuzzle,
    TileState,
};
use parsearch_core::hashing::HashConfig;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Tile,
    Grid,
    Graph,
    Lattice,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Tile => "tile",
            Domain::Grid => "grid",
            Domain::Graph => "graph",
            Domain::Lattice => "lattice",
        })
    }
}

/// Where an instance comes from: a file or a generator spec such as
/// `n=3,seed=7`.
#[derive(Clone, Debug)]
pub enum Source {
    File(String),
    Gen(String),
}

#[derive(Clone, Debug, Default)]
pub struct Endpoints {
    pub start: Option<Cell>,
    pub goal: Option<Cell>,
}

pub fn parse_cell(s: &str) -> Result<Cell, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got `{s}`"))?;
    let x = x.trim().parse().map_err(|_| format!("bad x in `{s}`"))?;
    let y = y.trim().parse().map_err(|_| format!("bad y in `{s}`"))?;
    Ok(Cell::new(x, y))
}

pub enum Instance {
    Tile(TilePuzzle),
    Grid(GridProblem),
    Graph(ExplicitGraph),
    Lattice(LatticeProblem),
}

/// Runs `$body` with `$p` bound to the concrete problem.
macro_rules! with_problem {
    ($inst:expr, $p:ident => $body:expr) => {
        match $inst {
            $crate::instance::Instance::Tile($p) => $body,
            $crate::instance::Instance::Grid($p) => $body,
            $crate::instance::Instance::Graph($p) => $body,
            $crate::instance::Instance::Lattice($p) => $body,
        }
    };
}
pub(crate) use with_problem;

fn gen<T: FromStr>(pairs: &[(String, String)], key: &str, default: T) -> Result<T> {
    Ok(gen_value(pairs, key, Some(default))?)
}

fn check_keys(pairs: &[(String, String)], allowed: &[&str]) -> Result<()> {
    for (k, _) in pairs {
        if !allowed.contains(&k.as_str()) {
            bail!("unknown generator key `{k}` (expected one of {})", allowed.join(", "));
        }
    }
    Ok(())
}

/// Lattice text: one line of side lengths, then 2^dims move costs indexed
/// by the bit mask of advanced axes.
fn parse_lattice(text: &str) -> Result<LatticeProblem> {
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty());
    let lengths: Vec<u32> = lines
        .next()
        .ok_or_else(|| anyhow!("empty lattice file"))?
        .split_whitespace()
        .map(|t| t.parse().with_context(|| format!("bad length `{t}`")))
        .collect::<Result<_>>()?;
    let costs: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .map(|t| t.parse().with_context(|| format!("bad cost `{t}`")))
        .collect::<Result<_>>()?;
    Ok(LatticeProblem::new(lengths, costs)?)
}

pub fn load(domain: Domain, source: &Source, ends: &Endpoints, hash: &HashConfig, seed: u64) -> Result<Instance> {
    let text = match source {
        Source::File(path) => Some(
            std::fs::read_to_string(Path::new(path)).with_context(|| format!("cannot read instance `{path}`"))?,
        ),
        Source::Gen(_) => None,
    };
    let pairs = match source {
        Source::Gen(spec) => parse_gen_spec(spec)?,
        Source::File(_) => Vec::new(),
    };
    let inst = match domain {
        Domain::Tile => {
            let start = match &text {
                Some(t) => TileState::parse(t)?,
                None => {
                    check_keys(&pairs, &["n", "seed", "walk"])?;
                    let n: usize = gen(&pairs, "n", 3)?;
                    if !(2..=8).contains(&n) {
                        bail!("tile width must be between 2 and 8");
                    }
                    let seed = gen(&pairs, "seed", seed)?;
                    match gen::<usize>(&pairs, "walk", 0)? {
                        0 => TileState::random_solvable(n, seed),
                        steps => TileState::random_walk(n, steps, seed),
                    }
                }
            };
            Instance::Tile(
                TilePuzzle::new(start)
                    .with_abstraction_tiles(hash.tile_abstraction.clone())
                    .with_projection_rows(hash.tile_projection_rows),
            )
        }
        Domain::Grid => {
            let map = match &text {
                Some(t) => GridMap::parse(t)?,
                None => {
                    check_keys(&pairs, &["w", "h", "density", "seed", "conn"])?;
                    let conn = match gen(&pairs, "conn", 8u32)? {
                        4 => Connectivity::Four,
                        8 => Connectivity::Eight,
                        c => bail!("connectivity must be 4 or 8, got {c}"),
                    };
                    let density: f64 = gen(&pairs, "density", 0.2)?;
                    if !(0.0..1.0).contains(&density) {
                        bail!("density must lie in [0, 1)");
                    }
                    GridMap::random(gen(&pairs, "w", 16)?, gen(&pairs, "h", 16)?, density, conn, gen(&pairs, "seed", seed)?)
                }
            };
            let (w, h) = (map.width() as u32, map.height() as u32);
            if w == 0 || h == 0 {
                bail!("empty grid");
            }
            let start = ends.start.unwrap_or(Cell::new(0, 0));
            let goal = ends.goal.unwrap_or(Cell::new(w - 1, h - 1));
            Instance::Grid(
                GridProblem::new(map, start, goal)?
                    .with_block(hash.grid_block)
                    .with_projection_block(hash.grid_projection_block),
            )
        }
        Domain::Graph => Instance::Graph(match &text {
            Some(t) => ExplicitGraph::parse(t)?,
            None => {
                check_keys(&pairs, &["nodes", "edges", "seed"])?;
                ExplicitGraph::random(gen(&pairs, "nodes", 30)?, gen(&pairs, "edges", 90)?, gen(&pairs, "seed", seed)?)?
            }
        }),
        Domain::Lattice => Instance::Lattice(match &text {
            Some(t) => parse_lattice(t)?,
            None => {
                check_keys(&pairs, &["dims", "len", "seed"])?;
                let dims: usize = gen(&pairs, "dims", 3)?;
                if !(1..=10).contains(&dims) {
                    bail!("lattice dims must be between 1 and 10");
                }
                LatticeProblem::random(dims, gen(&pairs, "len", 6)?, gen(&pairs, "seed", seed)?)?
            }
        }),
    };
    Ok(inst)
}
