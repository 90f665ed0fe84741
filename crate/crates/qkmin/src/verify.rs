//! Self-contained invariant suites: backend equivalence, search-all set
//! equality, the bracket postcondition, and the schedule sum bound. The CLI
//! `verify` subcommand runs these and reports one pass/fail line per suite;
//! the integration tests reuse them directly.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    find_minimum, fm_query_budget, search_all_budget, search_all_marked, threshold_binary_search,
    QcMode,
};
use crate::error::Result;
use crate::oracle::{marked_set, Dataset, DataDistribution, KeyOrder, QueryLedger, SetOracle};
use crate::sim::{success_probability, Backend, StateVector};

/// Outcome of one invariant suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl SuiteReport {
    fn new(name: &'static str, passed: bool, details: String) -> Self {
        SuiteReport {
            name,
            passed,
            details,
        }
    }
}

/// Statevector marked-probability must match the closed form
/// sin^2((2j+1) asin(sqrt(k/N))) to 1e-10 across the grid.
pub fn backend_equivalence(quick: bool) -> Result<SuiteReport> {
    let (max_n, max_k, max_j) = if quick { (256, 8, 20) } else { (1024, 16, 40) };
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9);
    let mut worst: f64 = 0.0;
    let mut cases = 0usize;
    let mut n = 2usize;
    while n <= max_n {
        for k in 0..=n.min(max_k) {
            let marked: BTreeSet<usize> = rand::seq::index::sample(&mut rng, n, k)
                .into_iter()
                .collect();
            let oracle = SetOracle::new(n, marked);
            let mut state = StateVector::uniform(n.trailing_zeros())?;
            for j in 0..=max_j {
                let expected = success_probability(n, k, j)?;
                let got = state.marked_probability(&oracle);
                worst = worst.max((got - expected).abs());
                cases += 1;
                state.grover_iterate(&oracle, 1);
            }
        }
        n *= 2;
    }
    Ok(SuiteReport::new(
        "backend-equivalence",
        worst <= 1e-10,
        format!("{cases} grid points, max |deviation| = {worst:.3e}"),
    ))
}

/// Search-all-marked must return exactly the marked set on every run that
/// completes, over exhaustive singletons and random marked sets.
pub fn search_all_set_equality(quick: bool) -> Result<SuiteReport> {
    let sizes: &[usize] = if quick {
        &[2, 4, 8, 16, 32, 64]
    } else {
        &[2, 4, 8, 16, 32, 64, 128, 256]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e7);
    let mut runs = 0usize;
    let mut mismatches = 0usize;
    let mut budget_failures = 0usize;
    for &n in sizes {
        // Every singleton.
        for x in 0..n {
            runs += 1;
            let oracle = SetOracle::new(n, [x]);
            match search_all_marked(&oracle, Backend::Analytic, &mut rng, search_all_budget(1, n))
            {
                Ok(found) => {
                    if found != BTreeSet::from([x]) {
                        mismatches += 1;
                    }
                }
                Err(_) => budget_failures += 1,
            }
        }
        // Random marked sets of every size up to 16.
        for k in 0..=n.min(16) {
            for _ in 0..(if quick { 1 } else { 3 }) {
                runs += 1;
                let marked: BTreeSet<usize> = rand::seq::index::sample(&mut rng, n, k)
                    .into_iter()
                    .collect();
                let oracle = SetOracle::new(n, marked.iter().copied());
                match search_all_marked(
                    &oracle,
                    Backend::Analytic,
                    &mut rng,
                    search_all_budget(k, n),
                ) {
                    Ok(found) => {
                        if found != marked {
                            mismatches += 1;
                        }
                    }
                    Err(_) => budget_failures += 1,
                }
            }
        }
    }
    Ok(SuiteReport::new(
        "search-all-set-equality",
        mismatches == 0,
        format!(
            "{runs} runs, {mismatches} set mismatches, {budget_failures} budget exhaustions"
        ),
    ))
}

/// Every bracketed exact-mode search must satisfy h(next) <= k < h(found),
/// checked against the classical marked sets.
pub fn binary_search_postcondition(quick: bool) -> Result<SuiteReport> {
    let runs_per_config = if quick { 10 } else { 40 };
    let mut rng = ChaCha8Rng::seed_from_u64(0xb5);
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut unbracketed = 0usize;
    for (n, k) in [(64usize, 4usize), (256, 10), (1024, 16)] {
        for trial in 0..runs_per_config {
            let ds = Dataset::generate(n, DataDistribution::Uniform, (n + trial) as u64)?;
            let ledger = QueryLedger::new();
            let fm = find_minimum(
                &ds,
                fm_query_budget(n),
                &ledger,
                Backend::Analytic,
                &mut rng,
                true,
            )?;
            let bracket =
                threshold_binary_search(&fm.trace, k, &ds, 12, &ledger, QcMode::Exact, &mut rng)?;
            if !bracket.bracketed {
                unbracketed += 1;
                continue;
            }
            checked += 1;
            let h = |t: Option<usize>| -> usize {
                t.map_or(n, |t| marked_set(&ds, t, KeyOrder::ASCENDING).unwrap().len())
            };
            let h_found = h(bracket.threshold);
            // Window successor of the returned threshold.
            let tail = fm.trace.thresholds.len().min(k + 2);
            let offset = fm.trace.thresholds.len() - tail;
            let successor = match bracket.threshold {
                None => fm.trace.thresholds.get(offset).copied(),
                Some(t) => fm.trace.thresholds[offset..]
                    .iter()
                    .position(|&x| x == t)
                    .and_then(|pos| fm.trace.thresholds.get(offset + pos + 1).copied()),
            };
            let ok = match successor {
                Some(next) => h(Some(next)) <= k && k < h_found,
                None => k < h_found,
            };
            if !ok || h_found != bracket.kprime {
                violations += 1;
            }
        }
    }
    Ok(SuiteReport::new(
        "binary-search-postcondition",
        violations == 0,
        format!("{checked} bracketed runs checked, {violations} violations, {unbracketed} traces never descended to k"),
    ))
}

/// sum_{t=1..k} sqrt(1/t) < 2 sqrt(k) - 1 strictly for k >= 2; k = 1 is the
/// equality boundary.
pub fn schedule_sum_bound() -> SuiteReport {
    let mut pass = true;
    let mut details = Vec::new();
    // k = 1: both sides are exactly 1.
    let lhs1: f64 = 1.0;
    let rhs1 = 2.0f64.mul_add(1.0, -1.0);
    if (lhs1 - rhs1).abs() > 0.0 {
        pass = false;
    }
    details.push("k=1: equality".to_string());
    for k in [2u64, 3, 10, 100, 10_000, 1_000_000] {
        let mut sum = 0.0f64;
        for t in 1..=k {
            sum += (1.0 / t as f64).sqrt();
        }
        let bound = 2.0 * (k as f64).sqrt() - 1.0;
        if sum >= bound {
            pass = false;
            details.push(format!("k={k}: sum {sum:.6} !< bound {bound:.6}"));
        } else {
            details.push(format!("k={k}: {sum:.4} < {bound:.4}"));
        }
    }
    SuiteReport::new("schedule-sum-bound", pass, details.join("; "))
}

/// Runs every suite.
pub fn run_all(quick: bool) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        backend_equivalence(quick)?,
        search_all_set_equality(quick)?,
        binary_search_postcondition(quick)?,
        schedule_sum_bound(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass() {
        for report in run_all(true).unwrap() {
            assert!(report.passed, "{}: {}", report.name, report.details);
        }
    }

    #[test]
    fn sum_bound_details_mention_equality() {
        let report = schedule_sum_bound();
        assert!(report.passed);
        assert!(report.details.contains("k=1: equality"));
    }
}
