//! Quantum state backends and amplitude-amplification dynamics.
//!
//! Two interchangeable backends drive every algorithm: a full statevector
//! (exact, up to [`statevector::MAX_STATEVECTOR_QUBITS`] qubits) and a
//! closed-form rotation-subspace state (O(1) per operation, any size). Both
//! start from the uniform superposition, which is all the algorithms here
//! require, and they agree to 1e-10 on marked probabilities.

pub mod phase;
pub mod rotation;
pub mod statevector;

pub use phase::{estimation_cost, phase_estimate_grover, PhaseKernel};
pub use rotation::RotationState;
pub use statevector::{StateVector, MAX_STATEVECTOR_QUBITS};

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::Oracle;

/// Which state representation executes the Grover dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Full 2^n amplitudes.
    Statevector,
    /// Rotation-subspace closed form.
    Analytic,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Statevector => f.write_str("statevector"),
            Backend::Analytic => f.write_str("analytic"),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statevector" => Ok(Backend::Statevector),
            "analytic" => Ok(Backend::Analytic),
            other => Err(Error::InvalidConfig(format!("unknown backend `{other}`"))),
        }
    }
}

/// Result of collapsing the index register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementOutcome {
    /// Basis index in [0, 2^n). Padding sentinels can appear here; they are
    /// never marked.
    pub index: usize,
    /// Whether the oracle predicate holds on `index`.
    pub was_marked: bool,
}

/// Closed-form amplitude-amplification success probability
/// sin^2((2j+1) asin(sqrt(k/n))).
pub fn success_probability(n: usize, k: usize, j: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("domain must be nonempty".into()));
    }
    if k > n {
        return Err(Error::MarkedCount {
            marked: k,
            domain: n,
        });
    }
    if k == 0 {
        return Ok(0.0);
    }
    if k == n {
        return Ok(1.0);
    }
    let theta = (k as f64 / n as f64).sqrt().asin();
    Ok(((2 * j + 1) as f64 * theta).sin().powi(2))
}

/// Runs `j` Grover iterations from a fresh uniform state on the chosen
/// backend, then measures. Charges exactly `j` queries.
pub fn grover_measure<O: Oracle, R: Rng>(
    oracle: &O,
    j: u64,
    backend: Backend,
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let domain = oracle.domain_size();
    debug_assert!(domain.is_power_of_two());
    match backend {
        Backend::Statevector => {
            let qubits = domain.trailing_zeros();
            let mut state = StateVector::uniform(qubits)?;
            state.grover_iterate(oracle, j);
            state.measure(oracle, rng)
        }
        Backend::Analytic => {
            let mut state = RotationState::uniform(domain, oracle.marked_count())?;
            state.grover_iterate(oracle, j);
            Ok(state.measure(oracle, rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SetOracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_edge_cases() {
        // k = N/4 with one iteration is certain for any N divisible by 4.
        for n in [4usize, 64, 1024] {
            let p = success_probability(n, n / 4, 1).unwrap();
            assert!((p - 1.0).abs() < 1e-12, "n={n}: {p}");
        }
        assert_eq!(success_probability(128, 0, 17).unwrap(), 0.0);
        assert_eq!(success_probability(128, 128, 3).unwrap(), 1.0);
        assert!(success_probability(4, 5, 0).is_err());
    }

    #[test]
    fn closed_form_matches_statevector_at_n1024() {
        let oracle = SetOracle::new(1024, [77]);
        let mut sv = StateVector::uniform(10).unwrap();
        sv.grover_iterate(&oracle, 25);
        let expected = success_probability(1024, 1, 25).unwrap();
        assert!((sv.marked_probability(&oracle) - expected).abs() < 1e-10);
    }

    #[test]
    fn backends_agree_through_grover_measure() {
        let oracle = SetOracle::new(4, [1]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for backend in [Backend::Statevector, Backend::Analytic] {
            let out = grover_measure(&oracle, 1, backend, &mut rng).unwrap();
            assert_eq!(out.index, 1, "{backend}");
            assert!(out.was_marked);
        }
        // One iteration charged per call.
        assert_eq!(oracle.ledger().count(), 2);
    }
}
