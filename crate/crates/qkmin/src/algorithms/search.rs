//! Amplitude-amplification search with known and unknown marked counts, and
//! the repeated-exclusion search that collects every marked index.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Phase, Result};
use crate::oracle::{ExclusionOracle, Oracle};
use crate::sim::{grover_measure, Backend};

/// Growth factor of the iteration cap in the unknown-count schedule.
const SCHEDULE_GROWTH: f64 = 6.0 / 5.0;

/// Consecutive empty schedule passes required before a marked set is declared
/// empty. One pass misses a lone marked index about 1% of the time at
/// N = 256; requiring two drives the false-positive rate to ~1e-4 while the
/// confirmation cost stays O(sqrt(N)).
pub const EMPTINESS_PASSES: u32 = 2;

/// Outcome of running the exponential schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ScheduleOutcome {
    /// A verified marked index.
    Found(usize),
    /// One full pass (cap reached) without a hit; only reported in
    /// single-pass mode.
    PassEmpty,
    /// The per-call query budget ran out.
    Budget,
}

/// Core exponential schedule: rounds draw j uniformly below a cap that grows
/// by 6/5 per round up to sqrt(domain), each round running j Grover
/// iterations from a fresh uniform state, measuring, and spending one
/// verification query on the outcome. The drawn j is clamped so the call
/// never exceeds `budget`; an exhausted budget therefore consumes it exactly.
pub(crate) fn exponential_schedule<O: Oracle, R: Rng>(
    oracle: &O,
    backend: Backend,
    rng: &mut R,
    budget: u64,
    single_pass: bool,
) -> Result<ScheduleOutcome> {
    let ledger = oracle.ledger();
    let start = ledger.count();
    let cap = (oracle.domain_size() as f64).sqrt();
    let mut m = 1.0f64;
    loop {
        let used = ledger.since(start);
        if used >= budget {
            return Ok(ScheduleOutcome::Budget);
        }
        let remaining = budget - used;
        let drawn = rng.random_range(0..m.ceil() as u64);
        let j = drawn.min(remaining - 1);
        let outcome = grover_measure(oracle, j, backend, rng)?;
        if oracle.verify(outcome.index) {
            return Ok(ScheduleOutcome::Found(outcome.index));
        }
        let at_cap = m >= cap;
        m = (m * SCHEDULE_GROWTH).min(cap);
        if single_pass && at_cap {
            return Ok(ScheduleOutcome::PassEmpty);
        }
    }
}

/// Optimal iteration count floor(pi/4 sqrt(n/k)) for a known marked count.
pub fn known_iterations(domain: usize, marked: usize) -> u64 {
    (PI / 4.0 * (domain as f64 / marked as f64).sqrt()).floor() as u64
}

/// One amplitude-amplification shot with the marked count known exactly:
/// runs the optimal iteration count, measures, and returns the index if it
/// landed in the marked set. Charges exactly the iteration count.
pub fn aa_search_known<O: Oracle, R: Rng>(
    oracle: &O,
    backend: Backend,
    rng: &mut R,
) -> Result<Option<usize>> {
    let marked = oracle.marked_count();
    if marked == 0 {
        return Err(Error::NoMarkedIndices);
    }
    let j = known_iterations(oracle.domain_size(), marked);
    let outcome = grover_measure(oracle, j, backend, rng)?;
    Ok(outcome.was_marked.then_some(outcome.index))
}

/// Unknown-count search: exponential schedule run until a verified hit or
/// until exactly `budget` queries are consumed.
pub fn aa_search_unknown<O: Oracle, R: Rng>(
    oracle: &O,
    backend: Backend,
    rng: &mut R,
    budget: u64,
) -> Result<Option<usize>> {
    match exponential_schedule(oracle, backend, rng, budget, false)? {
        ScheduleOutcome::Found(x) => Ok(Some(x)),
        ScheduleOutcome::Budget => Ok(None),
        ScheduleOutcome::PassEmpty => unreachable!("continuous schedule has no pass boundary"),
    }
}

/// Default budget for collecting `k_expected` marked indices out of `domain`.
pub fn search_all_budget(k_expected: usize, domain: usize) -> u64 {
    (9.0 * ((k_expected + 1) as f64 * domain as f64).sqrt()).ceil() as u64
}

/// Collects the entire marked set of `base` by repeated unknown-count search
/// under an exclusion oracle, stopping once [`EMPTINESS_PASSES`] consecutive
/// schedule passes find nothing. Returns exactly the marked set on success;
/// budget exhaustion yields a partial-result error carrying what was found.
pub fn search_all_marked<B: Oracle, R: Rng>(
    base: &B,
    backend: Backend,
    rng: &mut R,
    budget: u64,
) -> Result<BTreeSet<usize>> {
    let ledger = base.ledger();
    let start = ledger.count();
    let mut oracle = ExclusionOracle::new(base, []);
    let mut empty_passes = 0u32;
    while empty_passes < EMPTINESS_PASSES {
        let used = ledger.since(start);
        if used >= budget {
            return Err(Error::budget_exhausted(
                Phase::SearchAll,
                oracle.excluded().iter().copied().collect(),
            ));
        }
        match exponential_schedule(&oracle, backend, rng, budget - used, true)? {
            ScheduleOutcome::Found(x) => {
                oracle.exclude(x);
                empty_passes = 0;
            }
            ScheduleOutcome::PassEmpty => empty_passes += 1,
            ScheduleOutcome::Budget => {
                return Err(Error::budget_exhausted(
                    Phase::SearchAll,
                    oracle.excluded().iter().copied().collect(),
                ));
            }
        }
    }
    Ok(oracle.excluded().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SetOracle;
    use crate::sim::success_probability;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_search_certainty_case() {
        let oracle = SetOracle::new(4, [3]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let found = aa_search_known(&oracle, Backend::Analytic, &mut rng).unwrap();
            assert_eq!(found, Some(3));
        }
        // j* = 1 per shot, no verification charge.
        assert_eq!(oracle.ledger().count(), 100);
    }

    #[test]
    fn known_search_everything_marked_needs_zero_iterations() {
        let oracle = SetOracle::new(4, 0..4);
        assert_eq!(known_iterations(4, 4), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let found = aa_search_known(&oracle, Backend::Statevector, &mut rng).unwrap();
        assert!(found.is_some());
        assert_eq!(oracle.ledger().count(), 0);
    }

    #[test]
    fn known_search_rejects_zero_marked() {
        let oracle = SetOracle::new(8, []);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            aa_search_known(&oracle, Backend::Analytic, &mut rng),
            Err(Error::NoMarkedIndices)
        ));
    }

    /// 1000 seeded shots at N=1024, k=1 land within four sigma of the
    /// closed-form success probability.
    #[test]
    fn known_search_rate_matches_closed_form() {
        let oracle = SetOracle::new(1024, [512]);
        let mut rng = ChaCha8Rng::seed_from_u64(1024);
        let trials = 1000;
        let mut hits = 0;
        for _ in 0..trials {
            if aa_search_known(&oracle, Backend::Analytic, &mut rng)
                .unwrap()
                .is_some()
            {
                hits += 1;
            }
        }
        let p = success_probability(1024, 1, known_iterations(1024, 1)).unwrap();
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (hits as f64 - trials as f64 * p).abs() <= 4.0 * sigma + 1.0,
            "hits={hits}, expected {}",
            trials as f64 * p
        );
    }

    #[test]
    fn unknown_search_empty_set_consumes_exact_budget() {
        let oracle = SetOracle::new(16, []);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for budget in [1u64, 7, 36, 100] {
            let before = oracle.ledger().count();
            let found = aa_search_unknown(&oracle, Backend::Analytic, &mut rng, budget).unwrap();
            assert_eq!(found, None);
            assert_eq!(oracle.ledger().since(before), budget);
        }
    }

    #[test]
    fn unknown_search_finds_single_marked_small_domain() {
        let oracle = SetOracle::new(4, [2]);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let budget = 18; // 9 sqrt(4)
        for _ in 0..1000 {
            let before = oracle.ledger().count();
            let found = aa_search_unknown(&oracle, Backend::Analytic, &mut rng, budget).unwrap();
            assert_eq!(found, Some(2));
            assert!(oracle.ledger().since(before) <= budget);
        }
    }

    /// Mean cost at N=256, k=64 stays under 9 sqrt(N/k) = 18.
    #[test]
    fn unknown_search_mean_queries_bound() {
        let oracle = SetOracle::new(256, 0..64);
        let mut rng = ChaCha8Rng::seed_from_u64(256);
        let trials = 1000u64;
        let before = oracle.ledger().count();
        for _ in 0..trials {
            let found =
                aa_search_unknown(&oracle, Backend::Analytic, &mut rng, 10_000).unwrap();
            assert!(found.is_some());
        }
        let mean = oracle.ledger().since(before) as f64 / trials as f64;
        assert!(mean <= 18.0, "mean queries {mean}");
    }

    #[test]
    fn search_all_collects_exact_set() {
        let oracle = SetOracle::new(8, [2, 5]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let found =
            search_all_marked(&oracle, Backend::Analytic, &mut rng, search_all_budget(2, 8))
                .unwrap();
        assert_eq!(found, BTreeSet::from([2, 5]));
    }

    #[test]
    fn search_all_empty_set_confirms_quickly() {
        let oracle = SetOracle::new(64, []);
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let found =
            search_all_marked(&oracle, Backend::Analytic, &mut rng, search_all_budget(0, 64))
                .unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn search_all_budget_exhaustion_carries_partial() {
        let oracle = SetOracle::new(1024, [1, 2, 3, 700, 900]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Too small to confirm emptiness after collecting.
        match search_all_marked(&oracle, Backend::Analytic, &mut rng, 12) {
            Err(Error::BudgetExhausted { phase, partial, .. }) => {
                assert_eq!(phase, Phase::SearchAll);
                assert!(partial.len() <= 5);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn statevector_and_analytic_agree_on_search() {
        let oracle = SetOracle::new(16, [3, 11]);
        for backend in [Backend::Statevector, Backend::Analytic] {
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            let found =
                search_all_marked(&oracle, backend, &mut rng, search_all_budget(2, 16)).unwrap();
            assert_eq!(found, BTreeSet::from([3, 11]), "{backend}");
        }
    }
}
