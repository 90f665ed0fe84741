//! Threshold-descent extremum search.
//!
//! Start from a uniformly random threshold, repeatedly search for any index
//! whose key lies strictly below it, and make each hit the new threshold.
//! Keys descend strictly, so the marked count shrinks every step; within the
//! standard query budget of 22.5 sqrt(N) + 1.4 log2(N)^2 the final threshold
//! is the true minimum with probability at least 1/2.

use rand::Rng;

use super::search::aa_search_unknown;
use crate::error::Result;
use crate::oracle::{Dataset, KeyOrder, Oracle, QueryLedger, ThresholdOracle};
use crate::sim::Backend;

/// Standard total query budget for one extremum search over `n` values.
pub fn fm_query_budget(n: usize) -> u64 {
    let n = n as f64;
    (22.5 * n.sqrt() + 1.4 * n.log2().powi(2)).ceil() as u64
}

/// Thresholds visited during one descent, in discovery order (the random
/// starting threshold first). Keys of consecutive entries strictly decrease.
#[derive(Debug, Clone)]
pub struct FmTrace {
    pub thresholds: Vec<usize>,
    pub budget_used: u64,
}

impl FmTrace {
    /// Final threshold, the candidate extremum.
    pub fn last(&self) -> usize {
        *self
            .thresholds
            .last()
            .expect("a trace always holds the starting threshold")
    }
}

/// Result of one extremum descent.
#[derive(Debug, Clone)]
pub struct FmOutcome {
    /// Candidate extremum index.
    pub index: usize,
    pub trace: FmTrace,
}

/// Shared descent engine; `order` decides which extremum is sought.
///
/// `certified_stop` enables the exact-count stopping rule used by exact-mode
/// callers and tests: the loop ends as soon as nothing lies below the
/// threshold, checked classically without charging the ledger. Without it the
/// search spends the entire budget, which is the plain query-model behavior.
pub fn find_extremum<R: Rng>(
    dataset: &Dataset,
    order: KeyOrder,
    budget: u64,
    ledger: &QueryLedger,
    backend: Backend,
    rng: &mut R,
    certified_stop: bool,
) -> Result<FmOutcome> {
    let start = ledger.count();
    let mut threshold = rng.random_range(0..dataset.len());
    let mut thresholds = vec![threshold];
    loop {
        if certified_stop && dataset.rank_under(threshold, order) == 0 {
            break;
        }
        let used = ledger.since(start);
        if used >= budget {
            break;
        }
        let oracle = ThresholdOracle::new(dataset, threshold, order, ledger)?;
        match aa_search_unknown(&oracle, backend, rng, budget - used)? {
            Some(x) => {
                debug_assert!(oracle.marks(x));
                threshold = x;
                thresholds.push(x);
            }
            None => break,
        }
    }
    Ok(FmOutcome {
        index: threshold,
        trace: FmTrace {
            thresholds,
            budget_used: ledger.since(start),
        },
    })
}

/// Finds the minimum-key index within `budget` queries.
pub fn find_minimum<R: Rng>(
    dataset: &Dataset,
    budget: u64,
    ledger: &QueryLedger,
    backend: Backend,
    rng: &mut R,
    certified_stop: bool,
) -> Result<FmOutcome> {
    find_extremum(
        dataset,
        KeyOrder::ASCENDING,
        budget,
        ledger,
        backend,
        rng,
        certified_stop,
    )
}

/// Finds the maximum-key index: the same descent under the reversed order.
pub fn find_maximum<R: Rng>(
    dataset: &Dataset,
    budget: u64,
    ledger: &QueryLedger,
    backend: Backend,
    rng: &mut R,
    certified_stop: bool,
) -> Result<usize> {
    Ok(find_extremum(
        dataset,
        KeyOrder::DESCENDING,
        budget,
        ledger,
        backend,
        rng,
        certified_stop,
    )?
    .index)
}
