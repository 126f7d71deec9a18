use web_time::Instant;

use super::table::{NodeTable, Relax};
use super::{Expansion, SearchOptions, SearchStats, Solution, Weight};
use crate::error::SearchError;
use crate::problem::{Cost, SearchProblem};

/// A* with reopening of CLOSED nodes on cheaper paths.
pub fn astar<P: SearchProblem>(problem: &P, opts: &SearchOptions) -> Result<Solution<P::State>, SearchError> {
    best_first(problem, Weight::ONE, true, opts)
}

/// Weighted A*: priority `g + w·h`, or `h` alone when `w` is infinite.
pub fn wastar<P: SearchProblem>(
    problem: &P,
    weight: Weight,
    opts: &SearchOptions,
) -> Result<Solution<P::State>, SearchError> {
    best_first(problem, weight, true, opts)
}

/// A* with the heuristic forced to zero.
pub fn uniform_cost<P: SearchProblem>(problem: &P, opts: &SearchOptions) -> Result<Solution<P::State>, SearchError> {
    best_first(problem, Weight::ONE, false, opts)
}

pub fn best_first<P: SearchProblem>(
    problem: &P,
    weight: Weight,
    use_heuristic: bool,
    opts: &SearchOptions,
) -> Result<Solution<P::State>, SearchError> {
    let started = Instant::now();
    let h = |s: &P::State| if use_heuristic { problem.heuristic(s) } else { 0.0 };
    let mut table: NodeTable<P::State, usize> = NodeTable::new(weight);
    let mut stats = SearchStats::default();
    let mut expansions = Vec::new();
    let mut succ: Vec<(P::State, Cost)> = Vec::new();

    table.relax(problem.initial(), 0.0, None, h);
    while let Some(i) = table.pop() {
        if opts.cancelled() {
            return Err(SearchError::Cancelled);
        }
        let node = table.node(i);
        let (g, hv) = (node.g, node.h);
        let state = node.state.clone();
        stats.expanded += 1;
        if opts.record_expansions {
            expansions.push(Expansion { state: state.clone(), g, f: g + hv, worker: 0 });
        }
        if problem.is_goal(&state) {
            stats.wall_time = started.elapsed().as_secs_f64();
            return Ok(Solution { cost: g, path: table.path_to(i), stats, expansions });
        }
        succ.clear();
        problem.expand(&state, &mut succ);
        for (next, c) in succ.drain(..) {
            stats.generated += 1;
            match table.relax(next, g + c, Some(i), h) {
                Relax::Reopened => stats.reopened += 1,
                Relax::Duplicate => stats.duplicates += 1,
                Relax::Inserted | Relax::Improved => {}
            }
        }
        stats.max_open = stats.max_open.max(table.open_len() as u64);
        if table.len() > opts.node_limit {
            return Err(SearchError::NodeLimit { limit: opts.node_limit });
        }
    }
    stats.wall_time = started.elapsed().as_secs_f64();
    let mut sol = Solution::unsolvable(stats);
    sol.expansions = expansions;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{ExplicitGraph, GridMap, GridProblem, TilePuzzle, TileState};
    use crate::domains::grid::Connectivity;
    use crate::problem::validate_path;

    #[test]
    fn initial_goal() {
        let p = TilePuzzle::new(TileState::goal(3));
        let s = astar(&p, &SearchOptions::default()).unwrap();
        assert_eq!(s.cost, 0.0);
        assert_eq!(s.path, vec![TileState::goal(3)]);
        assert_eq!(s.stats.expanded, 1);
    }

    #[test]
    fn missorder_graph_cost() {
        let g = ExplicitGraph::missorder();
        let s = astar(&g, &SearchOptions::default()).unwrap();
        assert_eq!(s.cost, 2.0);
        let names: Vec<&str> = s.path.iter().map(|&v| g.name(v)).collect();
        assert_eq!(names, ["a", "b", "d"]);
    }

    #[test]
    fn empty_grid_diagonal() {
        let p = GridProblem::corner_to_corner(GridMap::new(3, 3, Connectivity::Eight)).unwrap();
        let s = uniform_cost(&p, &SearchOptions::default()).unwrap();
        assert!((s.cost - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((validate_path(&p, &s.path).unwrap() - s.cost).abs() < 1e-12);
    }

    #[test]
    fn unreachable_goal_is_infinite() {
        let g = ExplicitGraph::parse("start a\ngoal c\na b 1\nb a 1\nnode c\n").unwrap();
        for s in [astar(&g, &Default::default()).unwrap(), uniform_cost(&g, &Default::default()).unwrap()] {
            assert!(s.cost.is_infinite());
            assert!(s.path.is_empty());
        }
    }

    #[test]
    fn node_limit_is_reported() {
        let p = TilePuzzle::new(TileState::random_solvable(4, 1));
        let opts = SearchOptions { node_limit: 50, ..Default::default() };
        assert_eq!(astar(&p, &opts).unwrap_err(), SearchError::NodeLimit { limit: 50 });
    }

    #[test]
    fn reopening_with_inconsistent_heuristic() {
        // h(b) overestimates the edge a->b, so b is closed via the expensive
        // route first and reopened once the cheap route shows up.
        let g = ExplicitGraph::parse(
            "start s\ngoal t\ns a 1\ns b 4\na b 1\nb t 5\nh a 5\nh b 0\nh s 0\n",
        )
        .unwrap();
        let s = astar(&g, &Default::default()).unwrap();
        assert_eq!(s.cost, 7.0);
        assert_eq!(s.stats.reopened, 1);
    }

    #[test]
    fn greedy_returns_valid_path() {
        let p = TilePuzzle::new(TileState::random_solvable(3, 4));
        let s = wastar(&p, Weight::Infinite, &Default::default()).unwrap();
        assert!((validate_path(&p, &s.path).unwrap() - s.cost).abs() < 1e-9);
    }
}
