//! Property tests for the structural invariants: order axioms, oracle set
//! algebra, probability bounds, ledger additivity, and serialization
//! round trips.

use std::collections::BTreeSet;

use proptest::prelude::*;

use qkmin::algorithms::RunReport;
use qkmin::bench::{run_trial, AlgorithmId, TrialSpec};
use qkmin::oracle::{
    marked_set, Dataset, ExclusionOracle, KeyOrder, Oracle, QueryLedger, SetOracle,
    ThresholdOracle,
};
use qkmin::sim::success_probability;

fn key_strategy() -> impl Strategy<Value = (f64, usize)> {
    // Coarse values force ties so the index tiebreak is exercised.
    (0..6i32, 0..12usize).prop_map(|(v, i)| (f64::from(v), i))
}

proptest! {
    #[test]
    fn key_order_is_a_strict_total_order(
        a in key_strategy(),
        b in key_strategy(),
        c in key_strategy(),
    ) {
        for order in [KeyOrder::ASCENDING, KeyOrder::DESCENDING] {
            prop_assert!(!order.less(a, a));
            let forward = order.less(a, b);
            let backward = order.less(b, a);
            prop_assert_eq!(u8::from(forward) + u8::from(backward) + u8::from(a == b), 1);
            if order.less(a, b) && order.less(b, c) {
                prop_assert!(order.less(a, c));
            }
        }
    }

    #[test]
    fn success_probability_stays_in_unit_interval(
        n in 1usize..4096,
        k_frac in 0.0f64..=1.0,
        j in 0u64..200,
    ) {
        let k = ((n as f64) * k_frac) as usize;
        let p = success_probability(n, k.min(n), j).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
    }

    /// The exclusion oracle marks exactly base \ excluded, and its rank
    /// bookkeeping enumerates that set consistently.
    #[test]
    fn exclusion_oracle_is_set_difference(
        domain_bits in 2u32..7,
        marked_seed in any::<u64>(),
        excluded_seed in any::<u64>(),
    ) {
        let domain = 1usize << domain_bits;
        let marked: BTreeSet<usize> = (0..domain)
            .filter(|x| (marked_seed >> (x % 64)) & 1 == 1)
            .collect();
        let excluded: BTreeSet<usize> = (0..domain)
            .filter(|x| (excluded_seed >> (x % 64)) & 1 == 1)
            .collect();
        let base = SetOracle::new(domain, marked.iter().copied());
        let oracle = ExclusionOracle::new(&base, excluded.iter().copied());
        let expected: BTreeSet<usize> = marked.difference(&excluded).copied().collect();
        let via_marks: BTreeSet<usize> = (0..domain).filter(|&x| oracle.marks(x)).collect();
        prop_assert_eq!(&via_marks, &expected);
        prop_assert_eq!(oracle.marked_count(), expected.len());
        for (r, &x) in expected.iter().enumerate() {
            prop_assert_eq!(oracle.nth_marked(r), Some(x));
            prop_assert_eq!(oracle.marked_rank(x), Some(r));
        }
    }

    /// Threshold-oracle counts agree with the brute-force reference set for
    /// any values, including heavy duplication.
    #[test]
    fn threshold_counts_match_reference(
        values in proptest::collection::vec(0..5i32, 1..40),
        t_pick in any::<prop::sample::Index>(),
    ) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let t = t_pick.index(values.len());
        let ds = Dataset::new(values).unwrap();
        let ledger = QueryLedger::new();
        for order in [KeyOrder::ASCENDING, KeyOrder::DESCENDING] {
            let reference = marked_set(&ds, t, order).unwrap();
            let oracle = ThresholdOracle::new(&ds, t, order, &ledger).unwrap();
            prop_assert_eq!(oracle.marked_count(), reference.len());
            prop_assert!(!reference.contains(&t));
            let enumerated: BTreeSet<usize> = (0..oracle.marked_count())
                .map(|r| oracle.nth_marked(r).unwrap())
                .collect();
            prop_assert_eq!(enumerated, reference);
        }
    }

    /// Dataset CSV round-trips exactly: the writer emits shortest
    /// round-trip decimal floats.
    #[test]
    fn dataset_csv_round_trip(values in proptest::collection::vec(-1e9f64..1e9, 1..50)) {
        let ds = Dataset::new(values).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv(&buf[..]).unwrap();
        prop_assert_eq!(ds.values(), back.values());
    }

    /// Run reports serialize and deserialize losslessly.
    #[test]
    fn run_report_json_round_trip(seed in any::<u64>()) {
        let spec = TrialSpec::new(AlgorithmId::KminProp, 64, 3);
        let report = run_trial(&spec, seed, None).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

/// Total queries of a two-phase run always equal the sum of its phase
/// ledgers, across algorithms and seeds.
#[test]
fn phase_ledgers_add_up() {
    for seed in 0..32u64 {
        let spec = TrialSpec::new(AlgorithmId::KminProp, 512, 6);
        let report = run_trial(&spec, seed, None).unwrap();
        let phases = report.phase_queries.expect("two-phase run records phases");
        assert_eq!(
            phases.find_minimum + phases.counting + phases.search_all,
            report.queries,
            "seed {seed}"
        );
    }
}
