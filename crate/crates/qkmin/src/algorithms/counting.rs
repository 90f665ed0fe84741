//! Marked-count estimation and the bracketing search over a descent trace.

use std::f64::consts::PI;

use rand::Rng;

use super::minimum::FmTrace;
use crate::error::{Error, Result};
use crate::oracle::{Dataset, KeyOrder, Oracle, QueryLedger, ThresholdOracle};
use crate::sim::phase::{estimation_cost, PhaseKernel};

/// How marked counts are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QcMode {
    /// Sample a phase-estimation reading and convert it to a count.
    Sampled,
    /// Read the count exactly (correctness isolation) while charging the
    /// nominal ceil(2 pi sqrt(N)) query cost of one counting invocation.
    Exact,
}

impl std::str::FromStr for QcMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(QcMode::Sampled),
            "exact" => Ok(QcMode::Exact),
            other => Err(Error::InvalidConfig(format!("unknown qc mode `{other}`"))),
        }
    }
}

/// Count estimate produced by one counting invocation.
#[derive(Debug, Clone, Copy)]
pub struct CountEstimate {
    pub k_hat: f64,
    pub p: u32,
    pub exact: bool,
}

/// Nominal query cost of one exact-mode counting invocation.
pub fn qc_nominal_cost(domain: usize) -> u64 {
    (2.0 * PI * (domain as f64).sqrt()).ceil() as u64
}

/// Counting qubits sufficient to resolve counts to within ~1/2 near `k`
/// marked out of `domain`.
pub fn resolution_qubits(domain: usize, k: usize) -> u32 {
    let needed = 4.0 * PI * (((k + 1) as f64) * domain as f64).sqrt();
    (needed.log2().ceil() as u32).clamp(1, 30)
}

/// Estimates the oracle's marked count.
///
/// Sampled mode draws one phase reading (charging 2^p - 1); exact mode reads
/// the count from the marked set and charges the nominal counting cost.
pub fn quantum_count<O: Oracle, R: Rng>(
    oracle: &O,
    p: u32,
    mode: QcMode,
    rng: &mut R,
) -> Result<CountEstimate> {
    let domain = oracle.domain_size();
    match mode {
        QcMode::Sampled => {
            let kernel = PhaseKernel::new(domain, oracle.marked_count(), p)?;
            oracle.ledger().charge(estimation_cost(p));
            let y = kernel.sample(rng);
            Ok(CountEstimate {
                k_hat: kernel.count_estimate(domain, y),
                p,
                exact: false,
            })
        }
        QcMode::Exact => {
            oracle.ledger().charge(qc_nominal_cost(domain));
            Ok(CountEstimate {
                k_hat: oracle.marked_count() as f64,
                p,
                exact: true,
            })
        }
    }
}

/// Result of bracketing a target count against a descent trace.
#[derive(Debug, Clone, Copy)]
pub struct BracketResult {
    /// Threshold whose marked count exceeds the target; `None` is the
    /// virtual sentinel above every key (marked count = N).
    pub threshold: Option<usize>,
    /// Estimated marked count at that threshold (k' >= k when bracketed).
    pub kprime: usize,
    /// Counting invocations spent.
    pub probes: u32,
    /// Whether the bracket condition h(next) <= k < h(threshold) was
    /// established. False only when the trace never descended to k or below,
    /// in which case the deepest entry is returned (k' > k, so a follow-up
    /// collection still covers the k smallest).
    pub bracketed: bool,
}

/// Binary search over the trace tail (sentinel prepended) for the adjacent
/// pair whose marked counts straddle `k`: h(next) <= k < h(found).
///
/// The tail spans the last k+2 entries: counts strictly decrease along the
/// trace, so at most k+1 entries can hold counts in 0..=k, and one more slot
/// guarantees the entry just above the target is still inside the window.
/// Counts are evaluated by [`quantum_count`] and each distinct entry is
/// probed at most once, so at most ceil(log2(k+2)) + 1 invocations occur.
pub fn threshold_binary_search<R: Rng>(
    trace: &FmTrace,
    k: usize,
    dataset: &Dataset,
    p: u32,
    ledger: &QueryLedger,
    mode: QcMode,
    rng: &mut R,
) -> Result<BracketResult> {
    if trace.thresholds.is_empty() {
        return Err(Error::InvalidConfig("descent trace is empty".into()));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("target count must be positive".into()));
    }
    if k >= dataset.len() {
        // Everything lies below the sentinel.
        return Ok(BracketResult {
            threshold: None,
            kprime: dataset.len(),
            probes: 0,
            bracketed: true,
        });
    }

    // Window: virtual sentinel followed by the last min(k+2, len) entries.
    let tail = trace.thresholds.len().min(k + 2);
    let offset = trace.thresholds.len() - tail;
    let window: Vec<Option<usize>> = std::iter::once(None)
        .chain(trace.thresholds[offset..].iter().map(|&t| Some(t)))
        .collect();

    let mut probes = 0u32;
    let mut cache: Vec<Option<f64>> = vec![None; window.len()];
    cache[0] = Some(dataset.len() as f64); // the sentinel count is known

    let mut probe = |slot: usize, cache: &mut Vec<Option<f64>>, rng: &mut R| -> Result<f64> {
        if let Some(h) = cache[slot] {
            return Ok(h);
        }
        let t = window[slot].expect("only real thresholds are probed");
        let oracle = ThresholdOracle::new(dataset, t, KeyOrder::ASCENDING, ledger)?;
        let estimate = quantum_count(&oracle, p, mode, rng)?;
        probes += 1;
        cache[slot] = Some(estimate.k_hat);
        Ok(estimate.k_hat)
    };

    // Counts strictly decrease along the window. If even the deepest entry
    // still exceeds k the bracket does not exist within the trace.
    let deepest = window.len() - 1;
    let above = |h: f64| h > k as f64 + 0.5;
    let h_deepest = probe(deepest, &mut cache, rng)?;
    if above(h_deepest) {
        return Ok(BracketResult {
            threshold: window[deepest],
            kprime: h_deepest.round().max(1.0) as usize,
            probes,
            bracketed: false,
        });
    }

    let (mut lo, mut hi) = (0usize, deepest);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if above(probe(mid, &mut cache, rng)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let kprime = cache[lo].expect("bracket bound was probed or is the sentinel");
    Ok(BracketResult {
        threshold: window[lo],
        kprime: kprime.round().max(1.0) as usize,
        probes,
        bracketed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{DataDistribution, SetOracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dyadic_sampled_count_is_exact() {
        let oracle = SetOracle::new(4, [0, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = quantum_count(&oracle, 2, QcMode::Sampled, &mut rng).unwrap();
        assert!((est.k_hat - 2.0).abs() < 1e-9);
        assert!(!est.exact);
        assert_eq!(oracle.ledger().count(), 3); // 2^2 - 1
    }

    #[test]
    fn zero_marked_counts_zero() {
        let oracle = SetOracle::new(64, []);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for mode in [QcMode::Sampled, QcMode::Exact] {
            let est = quantum_count(&oracle, 6, mode, &mut rng).unwrap();
            assert_eq!(est.k_hat, 0.0);
        }
    }

    #[test]
    fn exact_mode_charges_nominal_cost() {
        let oracle = SetOracle::new(256, [1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let est = quantum_count(&oracle, 12, QcMode::Exact, &mut rng).unwrap();
        assert_eq!(est.k_hat, 3.0);
        assert!(est.exact);
        assert_eq!(oracle.ledger().count(), qc_nominal_cost(256));
        assert_eq!(qc_nominal_cost(256), 101); // ceil(2 pi 16)
    }

    /// Median sampled error at N=256, k=10, p=12 stays within 1/2.
    #[test]
    fn sampled_count_median_error() {
        let oracle = SetOracle::new(256, 0..10);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let draws = 10_000;
        let mut errors: Vec<f64> = (0..draws)
            .map(|_| {
                let est = quantum_count(&oracle, 12, QcMode::Sampled, &mut rng).unwrap();
                (est.k_hat - 10.0).abs()
            })
            .collect();
        errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = errors[draws / 2];
        assert!(median <= 0.5, "median |k_hat - k| = {median}");
    }

    /// Builds a dataset where the marked count below the index holding value
    /// v is exactly v, plants a trace with chosen counts, and checks the
    /// bracket against a linear scan.
    fn trace_with_counts(counts: &[usize], n: usize) -> (Dataset, FmTrace) {
        let values: Vec<f64> = (0..n).map(|v| v as f64).collect();
        let ds = Dataset::new(values).unwrap();
        let thresholds: Vec<usize> = counts.to_vec();
        (
            ds,
            FmTrace {
                thresholds,
                budget_used: 0,
            },
        )
    }

    #[test]
    fn bracket_matches_linear_scan_reference() {
        // Trace counts descend 40, 25, 12, 7, 3, 1; the identity dataset makes
        // h(t) = t, so the thresholds are the counts themselves.
        let counts = [40usize, 25, 12, 7, 3, 1];
        let (ds, trace) = trace_with_counts(&counts, 64);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = 5;
        let got =
            threshold_binary_search(&trace, k, &ds, 12, &ledger, QcMode::Exact, &mut rng).unwrap();

        // Independent oracle: linear scan over the same window.
        let window: Vec<usize> = counts[counts.len().saturating_sub(k + 2)..].to_vec();
        let mut expected = None;
        for i in 0..window.len() {
            let h_here = window[i];
            let h_next = window.get(i + 1).copied().unwrap_or(0);
            if h_next <= k && k < h_here {
                expected = Some(window[i]);
                break;
            }
        }
        assert_eq!(got.threshold, expected, "bracket threshold");
        assert_eq!(got.kprime, 7);
        assert!(got.bracketed);
        assert!(got.probes <= ((k + 2) as f64).log2().ceil() as u32 + 1);
    }

    #[test]
    fn target_of_one_returns_smallest_count_above_one() {
        let counts = [40usize, 25, 12, 7, 3, 1];
        let (ds, trace) = trace_with_counts(&counts, 64);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let got =
            threshold_binary_search(&trace, 1, &ds, 12, &ledger, QcMode::Exact, &mut rng).unwrap();
        assert_eq!(got.kprime, 3);
        assert!(got.bracketed);
    }

    /// A descent that walks through every count at or below k pushes the
    /// bracket k+2 entries from the end; the window must still reach it
    /// instead of degenerating to the sentinel.
    #[test]
    fn window_reaches_past_a_fully_walked_tail() {
        let counts = [12usize, 5, 1, 0];
        let (ds, trace) = trace_with_counts(&counts, 64);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let got =
            threshold_binary_search(&trace, 1, &ds, 8, &ledger, QcMode::Exact, &mut rng).unwrap();
        assert_eq!(got.threshold, Some(5));
        assert_eq!(got.kprime, 5);
        assert!(got.bracketed);
    }

    #[test]
    fn target_at_or_beyond_n_uses_sentinel() {
        let counts = [12usize, 7, 3];
        let (ds, trace) = trace_with_counts(&counts, 16);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let got =
            threshold_binary_search(&trace, 16, &ds, 8, &ledger, QcMode::Exact, &mut rng).unwrap();
        assert_eq!(got.threshold, None);
        assert_eq!(got.kprime, 16);
        assert_eq!(got.probes, 0);
    }

    #[test]
    fn sentinel_brackets_a_too_low_initial_threshold() {
        // The only trace entry already has h <= k; the sentinel must bracket.
        let counts = [2usize];
        let (ds, trace) = trace_with_counts(&counts, 32);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let got =
            threshold_binary_search(&trace, 5, &ds, 8, &ledger, QcMode::Exact, &mut rng).unwrap();
        assert_eq!(got.threshold, None);
        assert_eq!(got.kprime, 32);
        assert!(got.bracketed);
    }

    #[test]
    fn unbracketed_trace_falls_back_to_deepest_entry() {
        // Every count exceeds k: the descent never reached the target.
        let counts = [40usize, 25, 12];
        let (ds, trace) = trace_with_counts(&counts, 64);
        let ledger = QueryLedger::new();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let got =
            threshold_binary_search(&trace, 5, &ds, 8, &ledger, QcMode::Exact, &mut rng).unwrap();
        assert_eq!(got.threshold, Some(12));
        assert_eq!(got.kprime, 12);
        assert!(!got.bracketed);
    }

    /// The bracket postcondition holds on randomized descent traces under
    /// exact counting, probing the real marked counts independently.
    #[test]
    fn bracket_postcondition_on_random_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..50 {
            let n = 256;
            let ds = Dataset::generate(n, DataDistribution::Uniform, trial).unwrap();
            let ledger = QueryLedger::new();
            let fm = crate::algorithms::minimum::find_minimum(
                &ds,
                fm_budget_for_test(n),
                &ledger,
                crate::sim::Backend::Analytic,
                &mut rng,
                true,
            )
            .unwrap();
            let k = 1 + (trial as usize % 12);
            let got = threshold_binary_search(
                &fm.trace,
                k,
                &ds,
                12,
                &ledger,
                QcMode::Exact,
                &mut rng,
            )
            .unwrap();
            if !got.bracketed {
                continue;
            }
            let h = |t: Option<usize>| -> usize {
                t.map_or(n, |t| {
                    crate::oracle::marked_set(&ds, t, KeyOrder::ASCENDING)
                        .unwrap()
                        .len()
                })
            };
            let h_found = h(got.threshold);
            assert!(k < h_found, "k={k} h={h_found}");
            assert_eq!(h_found, got.kprime);
            // The window successor of the returned threshold satisfies h <= k.
            let tail = fm.trace.thresholds.len().min(k + 2);
            let offset = fm.trace.thresholds.len() - tail;
            let successor = match got.threshold {
                // Sentinel: the successor is the first window entry.
                None => Some(fm.trace.thresholds[offset]),
                Some(t) => {
                    let pos = fm.trace.thresholds[offset..]
                        .iter()
                        .position(|&x| x == t)
                        .expect("bracket threshold comes from the window");
                    fm.trace.thresholds.get(offset + pos + 1).copied()
                }
            };
            let successor = successor.expect("a bracketed result has a window successor");
            assert!(h(Some(successor)) <= k);
        }
    }

    fn fm_budget_for_test(n: usize) -> u64 {
        crate::algorithms::minimum::fm_query_budget(n)
    }
}
