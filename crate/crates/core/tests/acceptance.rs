//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if a gated criterion fails. Criterion 10 is reported only.
//!
//! `cargo test -p parsearch-core --test acceptance -- <filter>` runs the
//! criteria whose label contains `<filter>`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use parsearch_core::allocation::{mean_ratio, ratio_bounds, sweep, CostModel};
use parsearch_core::domains::tile::tile_state_count;
use parsearch_core::domains::{Cell, Connectivity, ExplicitGraph, GridMap, GridProblem, LatticeProblem, TilePuzzle, TileState};
use parsearch_core::hashing::{azh_key, Distributor, FeatureProjection, HashConfig, StrategyKind, ZobristTable};
use parsearch_core::parallel::{
    hdastar, hdastar_interleaved, parallel_window, spastar, EngineConfig, SchedulePolicy, WorkerStats,
};
use parsearch_core::problem::validate_path;
use parsearch_core::serial::{astar, idastar};
use parsearch_core::termination::TerminationMode;
use parsearch_core::{Cost, SearchOptions, SearchProblem, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    label: &'static str,
    budget: Duration,
    gated: bool,
    run: fn() -> Outcome,
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria = [
        Criterion { id: 1, label: "optimality suite", budget: secs(300), gated: true, run: optimality },
        Criterion { id: 2, label: "hash identities", budget: secs(10), gated: true, run: hash_identities },
        Criterion { id: 3, label: "hyperplane successor-owner bound", budget: secs(30), gated: true, run: hyperplane },
        Criterion { id: 4, label: "communication overhead", budget: secs(120), gated: true, run: communication },
        Criterion { id: 5, label: "zobrist load balance", budget: secs(30), gated: true, run: load_balance },
        Criterion { id: 6, label: "termination safety", budget: secs(120), gated: true, run: termination_safety },
        Criterion { id: 7, label: "iterative allocation bounds", budget: secs(10), gated: true, run: allocation },
        Criterion { id: 8, label: "single-worker trace identity", budget: secs(10), gated: true, run: degeneration },
        Criterion { id: 9, label: "tile state count", budget: secs(1), gated: true, run: state_count },
        Criterion { id: 10, label: "speedup sanity (soft)", budget: secs(600), gated: false, run: speedup },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for c in criteria.iter().filter(|c| filters.is_empty() || filters.iter().any(|f| c.label.contains(f.as_str()))) {
        let t = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = t.elapsed();
        let over = if elapsed > c.budget { format!(" [over {}s budget]", c.budget.as_secs()) } else { String::new() };
        let (verdict, detail) = match (&result, c.gated) {
            (Ok(d), true) => ("PASS", d),
            (Err(d), true) => ("FAIL", d),
            (Ok(d), false) | (Err(d), false) => ("INFO", d),
        };
        println!("criterion {:>2} {:<34} {verdict} ({:.1}s{over}) {detail}", c.id, c.label, elapsed.as_secs_f64());
        if verdict == "FAIL" {
            failed.push(c.id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Independent uniform-cost oracle: plain Dijkstra over `expand`.

#[derive(PartialEq)]
struct Entry(Cost, u64);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra<P: SearchProblem>(p: &P) -> Cost {
    let mut ids: HashMap<P::State, u64> = HashMap::new();
    let mut states: Vec<P::State> = Vec::new();
    let mut dist: Vec<Cost> = Vec::new();
    let mut heap = BinaryHeap::new();
    let start = p.initial();
    ids.insert(start.clone(), 0);
    states.push(start);
    dist.push(0.0);
    heap.push(Entry(0.0, 0));
    let mut succ = Vec::new();
    while let Some(Entry(d, id)) = heap.pop() {
        if d > dist[id as usize] {
            continue;
        }
        let s = states[id as usize].clone();
        if p.is_goal(&s) {
            return d;
        }
        succ.clear();
        p.expand(&s, &mut succ);
        for (t, c) in succ.drain(..) {
            let nd = d + c;
            let tid = *ids.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                dist.push(f64::INFINITY);
                states.len() as u64 - 1
            });
            if nd < dist[tid as usize] {
                dist[tid as usize] = nd;
                heap.push(Entry(nd, tid));
            }
        }
    }
    f64::INFINITY
}

fn same_cost(a: Cost, b: Cost) -> bool {
    (a.is_infinite() && b.is_infinite() && a == b) || (a - b).abs() <= TOL
}

fn tiles(n: usize) -> Vec<TilePuzzle> {
    (0..n as u64).map(|s| TilePuzzle::new(TileState::random_solvable(3, s))).collect()
}

fn grids(n: usize) -> Vec<GridProblem> {
    (0..n as u64)
        .map(|s| {
            let map = GridMap::random(16, 16, 0.2, Connectivity::Eight, s);
            GridProblem::new(map, Cell::new(0, 0), Cell::new(15, 15)).expect("corners are open")
        })
        .collect()
}

fn graphs() -> Vec<ExplicitGraph> {
    let mut v = vec![ExplicitGraph::missorder()];
    for i in 0..9u64 {
        let nodes = 10 + 5 * i as usize;
        // The first two are sparse enough that the goal may be unreachable.
        let edges = if i < 2 { nodes } else { nodes * 4 };
        v.push(ExplicitGraph::random(nodes, edges, 100 + i).expect("valid graph"));
    }
    v
}

fn verify<P: SearchProblem>(p: &P, name: &str, sol: &Solution<P::State>, oracle: Cost, errors: &mut Vec<String>) {
    if !same_cost(sol.cost, oracle) {
        errors.push(format!("{name}: cost {} vs oracle {oracle}", sol.cost));
        return;
    }
    if sol.cost.is_finite() {
        match validate_path(p, &sol.path) {
            Ok(c) if (c - oracle).abs() <= 1e-6 => {}
            Ok(c) => errors.push(format!("{name}: path costs {c}, oracle {oracle}")),
            Err(e) => errors.push(format!("{name}: {e}")),
        }
    }
}

const OPT_STRATEGIES: [StrategyKind; 5] =
    [StrategyKind::Zobrist, StrategyKind::Azh, StrategyKind::Mult, StrategyKind::Abstraction, StrategyKind::Random];

fn solve_all<P: SearchProblem>(p: &P, tag: &str, errors: &mut Vec<String>) -> usize {
    let oracle = dijkstra(p);
    let opts = SearchOptions::default();
    let mut runs = 0;
    let mut record = |name: String, r: Result<Solution<P::State>, parsearch_core::SearchError>| {
        runs += 1;
        match r {
            Ok(sol) => verify(p, &format!("{tag} {name}"), &sol, oracle, errors),
            Err(e) => errors.push(format!("{tag} {name}: {e}")),
        }
    };
    record("astar".into(), astar(p, &opts));
    record("idastar".into(), idastar(p, &opts));
    for w in [2, 4] {
        let cfg = EngineConfig::new(w, StrategyKind::Zobrist);
        record(format!("spastar p={w}"), spastar(p, &cfg).map(|o| o.solution));
        record(format!("window p={w}"), parallel_window(p, &cfg).map(|o| o.solution));
    }
    for k in OPT_STRATEGIES {
        for w in [1, 2, 4, 8] {
            let cfg = EngineConfig::new(w, k);
            record(format!("hdastar {} p={w}", k.token()), hdastar(p, &cfg).map(|o| o.solution));
        }
    }
    runs
}

fn optimality() -> Outcome {
    let mut errors = Vec::new();
    let mut runs = 0;
    for (i, p) in tiles(100).iter().enumerate() {
        runs += solve_all(p, &format!("tile#{i}"), &mut errors);
    }
    for (i, p) in grids(50).iter().enumerate() {
        runs += solve_all(p, &format!("grid#{i}"), &mut errors);
    }
    let gs = graphs();
    let missorder = dijkstra(&gs[0]);
    check(missorder == 2.0, || format!("missorder oracle cost {missorder}, expected 2"))?;
    let unreachable = gs.iter().filter(|g| dijkstra(*g).is_infinite()).count();
    for (i, p) in gs.iter().enumerate() {
        runs += solve_all(p, &format!("graph#{i}"), &mut errors);
    }
    if errors.is_empty() {
        Ok(format!("{runs} runs on 160 instances match the oracle ({unreachable} unreachable graphs)"))
    } else {
        Err(format!("{} mismatches, first: {}", errors.len(), errors[..errors.len().min(3)].join("; ")))
    }
}

fn incremental_checks<P: SearchProblem>(p: &P, table: &ZobristTable, walks: usize, steps: usize, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut n = 0;
    let (mut f, mut removed, mut added, mut succ) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..walks {
        let mut s = p.initial();
        f.clear();
        p.features(&s, &mut f);
        let mut key = table.key(&f).map_err(|e| e.to_string())?;
        for _ in 0..steps {
            succ.clear();
            p.expand(&s, &mut succ);
            if succ.is_empty() {
                break;
            }
            let t = succ[rng.gen_range(0..succ.len())].0.clone();
            removed.clear();
            added.clear();
            p.feature_delta(&s, &t, &mut removed, &mut added);
            key = table.update(key, &removed, &added).map_err(|e| e.to_string())?;
            f.clear();
            p.features(&t, &mut f);
            let full = table.key(&f).map_err(|e| e.to_string())?;
            check(key == full, || format!("incremental {key:#x} != full {full:#x} at {t:?}"))?;
            let azh = azh_key(table, &FeatureProjection::identity(p.feature_count()), &f).map_err(|e| e.to_string())?;
            check(azh == full, || format!("identity-projected key {azh:#x} != {full:#x}"))?;
            n += 1;
            s = t;
        }
    }
    Ok(n)
}

fn hash_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fifteen = TilePuzzle::new(TileState::random_solvable(4, 1));
    let grid = GridProblem::new(GridMap::random(32, 32, 0.1, Connectivity::Eight, 3), Cell::new(0, 0), Cell::new(31, 31))
        .expect("corners are open");
    let lattice = LatticeProblem::uniform(4, 9);
    let mut n = 0;
    for seed in 0..4u64 {
        n += incremental_checks(&fifteen, &ZobristTable::new(fifteen.feature_count(), seed), 10, 100, &mut rng)?;
        n += incremental_checks(&grid, &ZobristTable::new(grid.feature_count(), seed), 10, 100, &mut rng)?;
        n += incremental_checks(&lattice, &ZobristTable::new(lattice.feature_count(), seed), 50, 20, &mut rng)?;
    }
    check(n >= 10_000, || format!("only {n} incremental checks"))?;

    let mut owners = 0;
    let cfg = HashConfig::default();
    let samples: Vec<TileState> = (0..50).map(|s| TileState::random_solvable(4, 1000 + s)).collect();
    let lattice_states = LatticeProblem::uniform(3, 5).all_states();
    let lp = LatticeProblem::uniform(3, 5);
    let mut scratch = Vec::new();
    for kind in OPT_STRATEGIES {
        let d = Distributor::new(&fifteen, kind, &cfg).map_err(|e| e.to_string())?;
        for p in 1..=64 {
            for s in &samples {
                let o = d.owner(&fifteen, s, p, &mut rng, &mut scratch);
                check(o < p, || format!("{} owner {o} with p={p}", kind.token()))?;
                owners += 1;
            }
        }
    }
    let hyper = Distributor::new(&lp, StrategyKind::Hyperplane, &cfg).map_err(|e| e.to_string())?;
    for p in 1..=64 {
        for s in &lattice_states {
            let o = hyper.owner(&lp, s, p, &mut rng, &mut scratch);
            check(o < p, || format!("hyperplane owner {o} with p={p}"))?;
            owners += 1;
        }
    }
    Ok(format!("{n} incremental and identity-projection checks, {owners} owners in range"))
}

fn hyperplane() -> Outcome {
    // (numerator, denominator) of the thickness.
    let thicknesses: [(u64, u64); 6] = [(1, 4), (1, 3), (1, 2), (1, 1), (2, 1), (3, 1)];
    let mut report = String::new();
    let mut violations = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut scratch = Vec::new();
    for n in 2..=4usize {
        let lattice = LatticeProblem::uniform(n, 5);
        let states = lattice.all_states();
        for &(a, b) in &thicknesses {
            let d = if a == 1 { format!("1/{b}") } else { a.to_string() };
            let bound = ((n as u64 * b + a.max(b)) / a) as usize;
            let mut worst = 0;
            let mut example = None;
            for p in [4usize, 8, 64] {
                let cfg = HashConfig { hyperplane_d: d.clone(), ..Default::default() };
                let dist = Distributor::new(&lattice, StrategyKind::Hyperplane, &cfg).map_err(|e| e.to_string())?;
                let mut succ = Vec::new();
                for s in &states {
                    succ.clear();
                    lattice.expand(s, &mut succ);
                    let owners: HashSet<usize> =
                        succ.iter().map(|(t, _)| dist.owner(&lattice, t, p, &mut rng, &mut scratch)).collect();
                    if owners.len() > worst {
                        worst = owners.len();
                        if worst > bound {
                            example = Some(format!("{s:?} p={p} owners={owners:?}"));
                        }
                    }
                }
            }
            let _ = write!(report, " n={n},d={d}:{worst}/{bound}");
            if worst > bound {
                violations.push(format!("n={n} d={d}: {worst} > {bound} at {}", example.unwrap_or_default()));
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("max/bound{report}"))
    } else {
        Err(format!("{} of 18 settings exceed the bound: {}", violations.len(), violations.join("; ")))
    }
}

fn sent_generated(workers: &[WorkerStats]) -> (u64, u64) {
    workers.iter().fold((0, 0), |(s, g), w| (s + w.sent, g + w.generated))
}

fn interleaved_co<P: SearchProblem>(p: &P, kind: StrategyKind, workers: usize, seed: u64) -> Result<(u64, u64), String> {
    let cfg = EngineConfig { seed, ..EngineConfig::new(workers, kind) };
    let dist = Distributor::new(p, kind, &cfg.hash).map_err(|e| e.to_string())?;
    let (out, _) = hdastar_interleaved(p, &dist, &cfg, SchedulePolicy::Random { seed }).map_err(|e| e.to_string())?;
    Ok(sent_generated(&out.workers))
}

fn communication() -> Outcome {
    let mut detail = String::new();
    let mut errors = Vec::new();
    let pool = tiles(200);
    for p in [4usize, 8, 16] {
        let (mut sent, mut generated) = (0, 0);
        for (i, tile) in pool.iter().enumerate() {
            let (s, g) = interleaved_co(tile, StrategyKind::Random, p, i as u64)?;
            sent += s;
            generated += g;
            if generated >= 100_000 {
                break;
            }
        }
        let co = sent as f64 / generated as f64;
        let expected = 1.0 - 1.0 / p as f64;
        let _ = write!(detail, "random p={p} CO={co:.4} (expect {expected:.4}, {generated} gen); ");
        if generated < 100_000 || (co - expected).abs() > 0.02 {
            errors.push(format!("random p={p}: CO {co:.4} over {generated} generations"));
        }
    }
    let suite = grids(50);
    let mut co = HashMap::new();
    for kind in [StrategyKind::Zobrist, StrategyKind::Abstraction] {
        let (mut sent, mut generated) = (0, 0);
        for (i, g) in suite.iter().enumerate() {
            let (s, gen) = interleaved_co(g, kind, 8, i as u64)?;
            sent += s;
            generated += gen;
        }
        co.insert(kind.token(), sent as f64 / generated as f64);
    }
    let _ = write!(detail, "grid p=8 CO zobrist={:.4} abstraction={:.4}", co["zobrist"], co["abstraction"]);
    if co["abstraction"] >= co["zobrist"] {
        errors.push("abstraction CO not below zobrist CO on grids".into());
    }
    if errors.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}: {detail}", errors.join("; ")))
    }
}

fn load_balance() -> Outcome {
    let probe = TilePuzzle::new(TileState::goal(4));
    let dist = Distributor::new(&probe, StrategyKind::Zobrist, &HashConfig::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0u64; 8];
    let mut scratch = Vec::new();
    let n = 100_000;
    for _ in 0..n {
        let s = TileState::random_solvable_with(4, &mut rng);
        counts[dist.owner(&probe, &s, 8, &mut rng, &mut scratch)] += 1;
    }
    let lb = *counts.iter().max().unwrap() as f64 / (n as f64 / 8.0);
    check(lb <= 1.05, || format!("max/mean {lb:.4} over {counts:?}"))?;
    Ok(format!("max/mean {lb:.4} over {n} states, shares {counts:?}"))
}

enum Any {
    Tile(TilePuzzle),
    Grid(GridProblem),
    Graph(ExplicitGraph),
    Lattice(LatticeProblem),
}

fn schedule_run<P: SearchProblem>(p: &P, oracle: Cost, seed: u64, kinds: &[StrategyKind]) -> Result<(u64, u64), String> {
    let kind = kinds[(seed as usize / 7) % kinds.len()];
    let workers = [2usize, 3, 4, 8][seed as usize % 4];
    let dist = Distributor::new(p, kind, &HashConfig { seed, ..Default::default() }).map_err(|e| e.to_string())?;
    let mut costs = Vec::new();
    let mut deliveries = 0;
    for mode in [TerminationMode::TwoWave, TerminationMode::Time] {
        let cfg = EngineConfig { termination: mode, seed, batch: Some(1 + seed as usize % 5), ..EngineConfig::new(workers, kind) };
        let (out, report) = hdastar_interleaved(p, &dist, &cfg, SchedulePolicy::Random { seed })
            .map_err(|e| format!("seed {seed} {mode}: {e}"))?;
        check(report.violations.is_empty(), || format!("seed {seed} {mode}: {}", report.violations.join("; ")))?;
        check(same_cost(out.solution.cost, oracle), || {
            format!("seed {seed} {mode} {} p={workers}: cost {} vs {oracle}", kind.token(), out.solution.cost)
        })?;
        costs.push(out.solution.cost);
        deliveries += report.deliveries;
    }
    check(same_cost(costs[0], costs[1]), || format!("seed {seed}: modes disagree {costs:?}"))?;
    Ok((deliveries, 1))
}

fn termination_safety() -> Outcome {
    let mut pool: Vec<Any> = Vec::new();
    pool.push(Any::Graph(ExplicitGraph::missorder()));
    for s in 0..4 {
        pool.push(Any::Tile(TilePuzzle::new(TileState::random_walk(3, 30, s))));
        pool.push(Any::Graph(ExplicitGraph::random(20, 70, 500 + s).expect("valid graph")));
        let map = GridMap::random(10, 10, 0.2, Connectivity::Eight, 40 + s);
        pool.push(Any::Grid(GridProblem::new(map, Cell::new(0, 0), Cell::new(9, 9)).expect("corners are open")));
    }
    pool.push(Any::Lattice(LatticeProblem::random(3, 4, 9).expect("valid lattice")));
    pool.push(Any::Graph(ExplicitGraph::random(15, 12, 77).expect("valid graph")));
    let oracles: Vec<Cost> = pool
        .iter()
        .map(|a| match a {
            Any::Tile(p) => dijkstra(p),
            Any::Grid(p) => dijkstra(p),
            Any::Graph(p) => dijkstra(p),
            Any::Lattice(p) => dijkstra(p),
        })
        .collect();
    let with_zobrist = [StrategyKind::Zobrist, StrategyKind::Random];
    let tile_kinds = [StrategyKind::Zobrist, StrategyKind::Azh, StrategyKind::Mult, StrategyKind::Abstraction, StrategyKind::Random];
    let lattice_kinds = [StrategyKind::Zobrist, StrategyKind::Hyperplane, StrategyKind::Random];
    let (mut deliveries, mut runs) = (0, 0);
    for seed in 0..1000u64 {
        let i = seed as usize % pool.len();
        let (d, r) = match &pool[i] {
            Any::Tile(p) => schedule_run(p, oracles[i], seed, &tile_kinds)?,
            Any::Grid(p) => schedule_run(p, oracles[i], seed, &tile_kinds)?,
            Any::Graph(p) => schedule_run(p, oracles[i], seed, &with_zobrist)?,
            Any::Lattice(p) => schedule_run(p, oracles[i], seed, &lattice_kinds)?,
        };
        deliveries += d;
        runs += r;
    }
    Ok(format!("{runs} seeded schedules x 2 modes optimal and safe, {deliveries} message deliveries"))
}

fn allocation() -> Outcome {
    let (worst, avg) = ratio_bounds(2.0).map_err(|e| e.to_string())?;
    check(worst == 4.0 && avg == 8.0 / 3.0, || format!("ratio_bounds(2) = ({worst}, {avg})"))?;
    let mut detail = format!("bounds ({worst}, {avg:.4});");
    for e in [1.0, 0.5, 0.25] {
        let rows = sweep(2.0, 1024, e, CostModel::discrete()).map_err(|e| e.to_string())?;
        check(rows.len() == 1024, || format!("{} rows", rows.len()))?;
        let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let mean = mean_ratio(&rows);
        check(max <= 4.0, || format!("E={e}: max ratio {max}"))?;
        check(mean <= 8.0 / 3.0 + 0.05, || format!("E={e}: mean ratio {mean}"))?;
        let _ = write!(detail, " E={e}: max {max:.4} mean {mean:.4};");
    }
    Ok(detail)
}

fn trace_matches<P: SearchProblem>(p: &P) -> Result<usize, String> {
    let serial = astar(p, &SearchOptions::recording()).map_err(|e| e.to_string())?;
    let cfg = EngineConfig { record_expansions: true, ..EngineConfig::new(1, StrategyKind::Zobrist) };
    let par = hdastar(p, &cfg).map_err(|e| e.to_string())?.solution;
    let a = format!("{:?}", serial.expansions);
    let b = format!("{:?}", par.expansions);
    check(a == b, || {
        let at = a.bytes().zip(b.bytes()).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        format!("traces differ at byte {at} ({} vs {} expansions)", serial.expansions.len(), par.expansions.len())
    })?;
    check(same_cost(serial.cost, par.cost), || format!("costs {} vs {}", serial.cost, par.cost))?;
    Ok(serial.expansions.len())
}

fn degeneration() -> Outcome {
    let mut total = 0;
    for s in 0..5 {
        total += trace_matches(&TilePuzzle::new(TileState::random_solvable(3, 300 + s)))?;
    }
    for g in grids(3) {
        total += trace_matches(&g)?;
    }
    total += trace_matches(&ExplicitGraph::missorder())?;
    total += trace_matches(&ExplicitGraph::random(40, 160, 9).map_err(|e| e.to_string())?)?;
    Ok(format!("10 instances, {total} expansions byte-identical"))
}

fn state_count() -> Outcome {
    let half_factorial = (1..=25u32).fold(BigUint::from(1u32), |acc, k| acc * k) / 2u32;
    let got = tile_state_count(5);
    check(got == half_factorial, || format!("{got} != {half_factorial}"))?;
    check(got.to_string() == "7755605021665492992000000", || got.to_string())?;
    Ok(format!("{got}"))
}

fn speedup() -> Outcome {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if cores < 4 {
        return Ok(format!("not applicable: {cores} hardware thread(s) available, 4 needed"));
    }
    for walk in [120usize, 160, 220] {
        let p = TilePuzzle::new(TileState::random_walk(4, walk, 17));
        let t = Instant::now();
        let serial = astar(&p, &SearchOptions::default()).map_err(|e| e.to_string())?;
        let serial_time = t.elapsed().as_secs_f64();
        if serial_time < 5.0 {
            continue;
        }
        let t = Instant::now();
        let par = hdastar(&p, &EngineConfig::new(4, StrategyKind::Zobrist)).map_err(|e| e.to_string())?;
        let par_time = t.elapsed().as_secs_f64();
        let verdict = if par_time < serial_time { "faster" } else { "not faster" };
        return Ok(format!(
            "15-puzzle walk={walk}: astar {serial_time:.2}s (cost {}), hdastar p=4 {par_time:.2}s (cost {}), {verdict}",
            serial.cost, par.solution.cost
        ));
    }
    Ok("no candidate instance took 5s serially".into())
}
