//! Browser bindings for three views of the engine: which worker owns each
//! cell of a gridmap, a reproducible HDA* run on that grid, and the cost
//! curve of iterative allocation.
//!
//! Every exported function returns a JSON string. The `*_data` functions
//! hold the logic and are what the native tests call.

use parsearch_core::allocation::{mean_ratio, ratio_bounds, sweep, CostModel, CostModelKind, IaRow};
use parsearch_core::domains::{Cell, Connectivity, GridMap, GridProblem};
use parsearch_core::hashing::{Distributor, HashConfig, StrategyKind};
use parsearch_core::metrics::overheads;
use parsearch_core::parallel::{hdastar_interleaved, EngineConfig, SchedulePolicy, WorkerStats};
use parsearch_core::serial::astar;
use parsearch_core::termination::TerminationMode;
use parsearch_core::{SearchOptions, SearchProblem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SIDE: u32 = 128;
const MAX_WORKERS: usize = 64;
const MAX_WIDTH: u64 = 1 << 16;

#[derive(Debug, Serialize)]
pub struct OwnerMap {
    pub width: u32,
    pub height: u32,
    pub workers: usize,
    pub strategy: String,
    pub open: Vec<bool>,
    /// Owner per cell in row-major order, -1 for blocked cells.
    pub owners: Vec<i32>,
    pub shares: Vec<u64>,
    pub load_balance: f64,
    /// Fraction of moves between open cells that cross owners.
    pub cut_fraction: f64,
}

#[derive(Debug, Serialize)]
pub struct HdaRun {
    pub width: u32,
    pub height: u32,
    pub workers: usize,
    pub strategy: String,
    pub termination: String,
    pub open: Vec<bool>,
    pub cost: Option<f64>,
    pub path: Vec<[u32; 2]>,
    /// `[x, y, worker]` in global expansion order.
    pub expansions: Vec<[u32; 3]>,
    pub per_worker: Vec<WorkerStats>,
    pub serial_expanded: u64,
    pub search_overhead: f64,
    pub communication_overhead: f64,
    pub load_balance: Option<f64>,
    pub detection_attempts: u64,
    pub steps: u64,
    pub deliveries: u64,
    pub violations: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct IaCurve {
    pub b: f64,
    pub e: f64,
    pub spare_reuse: bool,
    pub worst_bound: f64,
    pub average_bound: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub rows: Vec<IaRow>,
}

fn grid(width: u32, height: u32, density: f64, map_seed: u64) -> Result<GridProblem, String> {
    if !(1..=MAX_SIDE).contains(&width) || !(1..=MAX_SIDE).contains(&height) {
        return Err(format!("grid sides must lie in 1..={MAX_SIDE}"));
    }
    if !(0.0..1.0).contains(&density) {
        return Err("density must lie in [0, 1)".into());
    }
    let map = GridMap::random(width as usize, height as usize, density, Connectivity::Eight, map_seed);
    GridProblem::new(map, Cell::new(0, 0), Cell::new(width - 1, height - 1)).map_err(|e| e.to_string())
}

fn open_cells(p: &GridProblem) -> Vec<bool> {
    let m = p.map();
    (0..m.height() as u32)
        .flat_map(|y| (0..m.width() as u32).map(move |x| Cell::new(x, y)))
        .map(|c| m.is_open(c))
        .collect()
}

fn workers_in_range(workers: usize) -> Result<(), String> {
    if (1..=MAX_WORKERS).contains(&workers) {
        Ok(())
    } else {
        Err(format!("workers must lie in 1..={MAX_WORKERS}"))
    }
}

pub fn owner_map_data(
    width: u32,
    height: u32,
    density: f64,
    map_seed: u64,
    strategy: &str,
    workers: usize,
    hash_seed: u64,
) -> Result<OwnerMap, String> {
    workers_in_range(workers)?;
    let p = grid(width, height, density, map_seed)?;
    let kind: StrategyKind = strategy.parse().map_err(|e: parsearch_core::hashing::HashError| e.to_string())?;
    let dist = Distributor::new(&p, kind, &HashConfig { seed: hash_seed, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let open = open_cells(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(hash_seed);
    let mut scratch = Vec::new();
    let mut owners = vec![-1i32; open.len()];
    let mut shares = vec![0u64; workers];
    for (i, _) in open.iter().enumerate().filter(|(_, &o)| o) {
        let c = Cell::new(i as u32 % width, i as u32 / width);
        let o = dist.owner(&p, &c, workers, &mut rng, &mut scratch);
        owners[i] = o as i32;
        shares[o] += 1;
    }
    let (mut moves, mut cut) = (0u64, 0u64);
    let mut succ = Vec::new();
    for (i, &o) in owners.iter().enumerate().filter(|(_, &o)| o >= 0) {
        succ.clear();
        p.expand(&Cell::new(i as u32 % width, i as u32 / width), &mut succ);
        for (t, _) in &succ {
            moves += 1;
            if owners[(t.y * width + t.x) as usize] != o {
                cut += 1;
            }
        }
    }
    let total: u64 = shares.iter().sum();
    let load_balance = if total == 0 {
        1.0
    } else {
        *shares.iter().max().unwrap() as f64 / (total as f64 / workers as f64)
    };
    Ok(OwnerMap {
        width,
        height,
        workers,
        strategy: kind.token().to_string(),
        open,
        owners,
        shares,
        load_balance,
        cut_fraction: if moves == 0 { 0.0 } else { cut as f64 / moves as f64 },
    })
}

#[allow(clippy::too_many_arguments)]
pub fn hda_grid_data(
    width: u32,
    height: u32,
    density: f64,
    map_seed: u64,
    strategy: &str,
    workers: usize,
    termination: &str,
    schedule_seed: u64,
) -> Result<HdaRun, String> {
    workers_in_range(workers)?;
    let p = grid(width, height, density, map_seed)?;
    let kind: StrategyKind = strategy.parse().map_err(|e: parsearch_core::hashing::HashError| e.to_string())?;
    let mode: TerminationMode = termination.parse()?;
    let cfg = EngineConfig {
        termination: mode,
        seed: schedule_seed,
        record_expansions: true,
        ..EngineConfig::new(workers, kind)
    };
    let dist = Distributor::new(&p, kind, &cfg.hash).map_err(|e| e.to_string())?;
    let (out, report) = hdastar_interleaved(&p, &dist, &cfg, SchedulePolicy::Random { seed: schedule_seed })
        .map_err(|e| e.to_string())?;
    let serial = astar(&p, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let sol = &out.solution;
    let metrics = overheads(&serial.stats, &out.workers, sol.stats.wall_time).ok();
    Ok(HdaRun {
        width,
        height,
        workers,
        strategy: kind.token().to_string(),
        termination: mode.to_string(),
        open: open_cells(&p),
        cost: sol.cost.is_finite().then_some(sol.cost),
        path: sol.path.iter().map(|c| [c.x, c.y]).collect(),
        expansions: sol.expansions.iter().map(|e| [e.state.x, e.state.y, e.worker as u32]).collect(),
        per_worker: out.workers.clone(),
        serial_expanded: serial.stats.expanded,
        search_overhead: metrics.as_ref().map_or(0.0, |m| m.so),
        communication_overhead: metrics.as_ref().map_or(0.0, |m| m.co),
        load_balance: metrics.as_ref().map(|m| m.lb),
        detection_attempts: out.termination.attempts,
        steps: report.steps,
        deliveries: report.deliveries,
        violations: report.violations,
    })
}

pub fn ia_curve_data(b: f64, w_max: u64, e: f64, spare_reuse: bool) -> Result<IaCurve, String> {
    let (worst, average) = ratio_bounds(b).map_err(|e| e.to_string())?;
    if !(1..=MAX_WIDTH).contains(&w_max) {
        return Err(format!("maximum width must lie in 1..={MAX_WIDTH}"));
    }
    let model = CostModel { kind: CostModelKind::Discrete, spare_reuse };
    let rows = sweep(b, w_max, e, model).map_err(|e| e.to_string())?;
    Ok(IaCurve {
        b,
        e,
        spare_reuse,
        worst_bound: worst,
        average_bound: average,
        max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        mean_ratio: mean_ratio(&rows),
        rows,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn owner_map(
    width: u32,
    height: u32,
    density: f64,
    map_seed: u32,
    strategy: &str,
    workers: usize,
    hash_seed: u32,
) -> Result<String, JsError> {
    to_js(owner_map_data(width, height, density, map_seed as u64, strategy, workers, hash_seed as u64))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn run_hda_grid(
    width: u32,
    height: u32,
    density: f64,
    map_seed: u32,
    strategy: &str,
    workers: usize,
    termination: &str,
    schedule_seed: u32,
) -> Result<String, JsError> {
    to_js(hda_grid_data(width, height, density, map_seed as u64, strategy, workers, termination, schedule_seed as u64))
}

#[wasm_bindgen]
pub fn ia_curve(b: f64, w_max: u32, e: f64, spare_reuse: bool) -> Result<String, JsError> {
    to_js(ia_curve_data(b, w_max as u64, e, spare_reuse))
}
