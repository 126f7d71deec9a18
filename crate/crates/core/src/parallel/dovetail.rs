use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use parking_lot::Mutex;

use crate::problem::SearchProblem;
use crate::serial::{wastar, SearchOptions, Solution, Weight};
use crate::SearchError;

pub const DEFAULT_WEIGHTS: [Weight; 5] =
    [Weight::Finite(1.0), Weight::Finite(1.5), Weight::Finite(2.0), Weight::Finite(3.0), Weight::Infinite];

#[derive(Clone, Debug)]
pub struct DovetailOutcome<S> {
    pub solution: Solution<S>,
    /// Weight of the run that answered first.
    pub weight: Weight,
    /// Set unless the winner ran with weight 1.
    pub possibly_suboptimal: bool,
}

/// Runs one weighted A* per weight on its own thread. The first run to
/// finish answers for all of them and cancels the rest. A run that exhausts
/// the space answers "unsolvable" for everyone.
pub fn dovetail<P: SearchProblem>(
    problem: &P,
    weights: &[Weight],
    opts: &SearchOptions,
) -> Result<DovetailOutcome<P::State>, SearchError> {
    if weights.is_empty() {
        return Err(SearchError::config("dovetailing needs at least one weight"));
    }
    let cancel = Arc::new(AtomicBool::new(false));
    let winner: Mutex<Option<(Weight, Solution<P::State>)>> = Mutex::new(None);
    let failures: Mutex<Vec<SearchError>> = Mutex::new(Vec::new());
    thread::scope(|scope| {
        for &w in weights {
            let opts = SearchOptions { cancel: Some(cancel.clone()), ..opts.clone() };
            let (cancel, winner, failures) = (&cancel, &winner, &failures);
            scope.spawn(move || match wastar(problem, w, &opts) {
                Ok(sol) => {
                    let mut win = winner.lock();
                    if win.is_none() {
                        *win = Some((w, sol));
                        cancel.store(true, Ordering::Relaxed);
                    }
                }
                Err(SearchError::Cancelled) => {}
                Err(e) => failures.lock().push(e),
            });
        }
    });
    match winner.into_inner() {
        Some((weight, solution)) => Ok(DovetailOutcome { solution, weight, possibly_suboptimal: !weight.is_one() }),
        None => Err(failures.into_inner().into_iter().next().unwrap_or(SearchError::Cancelled)),
    }
}
