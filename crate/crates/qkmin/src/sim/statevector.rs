//! Full 2^n-amplitude statevector backend.

use num_complex::Complex64;
use rand::Rng;

use super::MeasurementOutcome;
use crate::error::{Error, Result};
use crate::oracle::Oracle;

/// Default qubit ceiling; 2^22 complex amplitudes is 64 MiB.
pub const MAX_STATEVECTOR_QUBITS: u32 = 22;

/// Tolerance for the normalization invariant.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Norm deviation beyond which measurement refuses to sample.
pub const MEASURE_NORM_GUARD: f64 = 1e-9;

/// The superposed index register as 2^n complex amplitudes.
#[derive(Debug, Clone)]
pub struct StateVector {
    qubits: u32,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition over 2^n basis states.
    pub fn uniform(qubits: u32) -> Result<Self> {
        Self::uniform_with_limit(qubits, MAX_STATEVECTOR_QUBITS)
    }

    /// Uniform superposition with an explicit qubit ceiling.
    pub fn uniform_with_limit(qubits: u32, limit: u32) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        if qubits > limit {
            return Err(Error::QubitLimit {
                requested: qubits,
                limit,
            });
        }
        let dim = 1usize << qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(StateVector {
            qubits,
            amplitudes: vec![amp; dim],
        })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Flips the sign of every marked amplitude; one charged oracle query for
    /// the whole batch.
    pub fn apply_oracle_phase<O: Oracle>(&mut self, oracle: &O) {
        debug_assert_eq!(oracle.domain_size(), self.len());
        oracle.ledger().charge(1);
        for (x, amp) in self.amplitudes.iter_mut().enumerate() {
            if oracle.marks(x) {
                *amp = -*amp;
            }
        }
    }

    /// Inversion about the mean amplitude.
    pub fn diffuse(&mut self) {
        let mean = self.amplitudes.iter().sum::<Complex64>() / self.len() as f64;
        for amp in self.amplitudes.iter_mut() {
            *amp = 2.0 * mean - *amp;
        }
    }

    /// `j` rounds of oracle phase flip followed by diffusion; charges `j`.
    pub fn grover_iterate<O: Oracle>(&mut self, oracle: &O, j: u64) {
        for _ in 0..j {
            self.apply_oracle_phase(oracle);
            self.diffuse();
        }
    }

    /// Probability mass on the oracle's marked set (simulation-side readout,
    /// not a measurement).
    pub fn marked_probability<O: Oracle>(&self, oracle: &O) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|&(x, _)| oracle.marks(x))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Samples a basis index from |amplitude|^2 and classifies it against the
    /// oracle predicate. The collapse itself is not modelled; every algorithm
    /// here discards the state after measuring.
    pub fn measure<O: Oracle, R: Rng>(
        &self,
        oracle: &O,
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > MEASURE_NORM_GUARD {
            return Err(Error::Unnormalized { deviation });
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut index = self.len() - 1;
        for (x, amp) in self.amplitudes.iter().enumerate() {
            acc += amp.norm_sqr();
            if u < acc {
                index = x;
                break;
            }
        }
        Ok(MeasurementOutcome {
            index,
            was_marked: oracle.marks(index),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SetOracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_amplitudes() {
        let sv = StateVector::uniform(1).unwrap();
        for amp in sv.amplitudes() {
            assert!((amp.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
            assert_eq!(amp.im, 0.0);
        }

        let sv = StateVector::uniform(2).unwrap();
        assert_eq!(sv.len(), 4);
        assert!(sv.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15));

        let sv = StateVector::uniform(10).unwrap();
        assert_eq!(sv.len(), 1024);
        let expected = 2f64.powi(-5);
        assert!(sv.amplitudes().iter().all(|a| (a.re - expected).abs() < 1e-15));
        assert!((sv.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(
            StateVector::uniform(MAX_STATEVECTOR_QUBITS + 1),
            Err(Error::QubitLimit { .. })
        ));
        assert!(matches!(StateVector::uniform(0), Err(Error::ZeroQubits)));
        assert!(StateVector::uniform_with_limit(24, 24).is_ok());
    }

    #[test]
    fn oracle_phase_flips_marked_amplitudes() {
        let oracle = SetOracle::new(4, [3]);
        let mut sv = StateVector::uniform(2).unwrap();
        sv.apply_oracle_phase(&oracle);
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (amp, want) in sv.amplitudes().iter().zip(expected) {
            assert!((amp.re - want).abs() < 1e-15);
        }
        assert_eq!(oracle.ledger().count(), 1);
    }

    #[test]
    fn empty_marked_set_leaves_state_unchanged_but_charges() {
        let oracle = SetOracle::new(4, []);
        let mut sv = StateVector::uniform(2).unwrap();
        let before = sv.amplitudes().to_vec();
        sv.apply_oracle_phase(&oracle);
        assert_eq!(sv.amplitudes(), &before[..]);
        assert_eq!(oracle.ledger().count(), 1);
    }

    /// Brute-force sign table over all 8 indices for M = {0, 1}.
    #[test]
    fn oracle_phase_sign_table_n3() {
        let marked = [0usize, 1];
        let oracle = SetOracle::new(8, marked);
        let mut sv = StateVector::uniform(3).unwrap();
        let base = sv.amplitudes().to_vec();
        sv.apply_oracle_phase(&oracle);
        for (x, (amp, before)) in sv.amplitudes().iter().zip(&base).enumerate() {
            let sign = if marked.contains(&x) { -1.0 } else { 1.0 };
            assert_eq!(*amp, before * sign, "index {x}");
        }
    }

    #[test]
    fn grover_certainty_and_half_cases() {
        // N=4, k=1, j=1: probability exactly 1.
        let oracle = SetOracle::new(4, [2]);
        let mut sv = StateVector::uniform(2).unwrap();
        sv.grover_iterate(&oracle, 1);
        assert!((sv.marked_probability(&oracle) - 1.0).abs() < NORM_TOLERANCE);
        assert_eq!(oracle.ledger().count(), 1);

        // N=2, k=1, j=1: probability 1/2.
        let oracle = SetOracle::new(2, [0]);
        let mut sv = StateVector::uniform(1).unwrap();
        sv.grover_iterate(&oracle, 1);
        assert!((sv.marked_probability(&oracle) - 0.5).abs() < NORM_TOLERANCE);
    }

    /// Closed form sin^2((2j+1) asin(sqrt(1/8))) evaluated independently.
    #[test]
    fn grover_matches_closed_form_n8() {
        let oracle = SetOracle::new(8, [5]);
        let mut sv = StateVector::uniform(3).unwrap();
        sv.grover_iterate(&oracle, 2);
        let theta = (1.0f64 / 8.0).sqrt().asin();
        let expected = (5.0 * theta).sin().powi(2);
        assert!((sv.marked_probability(&oracle) - expected).abs() < 1e-12);
        assert!((sv.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
    }

    /// After any number of iterations from uniform, marked amplitudes stay
    /// mutually equal and unmarked amplitudes stay mutually equal.
    #[test]
    fn subspace_preservation() {
        let oracle = SetOracle::new(16, [1, 7, 9]);
        let mut sv = StateVector::uniform(4).unwrap();
        for _ in 0..12 {
            sv.grover_iterate(&oracle, 1);
            let marked: Vec<f64> = (0..16)
                .filter(|&x| oracle.marks(x))
                .map(|x| sv.amplitudes()[x].re)
                .collect();
            let unmarked: Vec<f64> = (0..16)
                .filter(|&x| !oracle.marks(x))
                .map(|x| sv.amplitudes()[x].re)
                .collect();
            for m in &marked {
                assert!((m - marked[0]).abs() < NORM_TOLERANCE);
            }
            for u in &unmarked {
                assert!((u - unmarked[0]).abs() < NORM_TOLERANCE);
            }
            assert!((sv.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        }
    }

    #[test]
    fn measure_point_mass_is_deterministic() {
        let oracle = SetOracle::new(8, [5]);
        let mut sv = StateVector::uniform(3).unwrap();
        sv.amplitudes.fill(Complex64::new(0.0, 0.0));
        sv.amplitudes[5] = Complex64::new(1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..32 {
            let out = sv.measure(&oracle, &mut rng).unwrap();
            assert_eq!(out.index, 5);
            assert!(out.was_marked);
        }
    }

    #[test]
    fn measure_uniform_frequencies_within_four_sigma() {
        let oracle = SetOracle::new(4, [0]);
        let sv = StateVector::uniform(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        let trials = 100_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            counts[sv.measure(&oracle, &mut rng).unwrap().index] += 1;
        }
        let expected = trials as f64 * 0.25;
        let sigma = (trials as f64 * 0.25 * 0.75).sqrt();
        for (x, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expected).abs() < 4.0 * sigma,
                "index {x}: {c} vs {expected}"
            );
        }
    }

    #[test]
    fn measure_rejects_unnormalized_state() {
        let oracle = SetOracle::new(4, [0]);
        let mut sv = StateVector::uniform(2).unwrap();
        sv.amplitudes[0] *= 3.0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sv.measure(&oracle, &mut rng),
            Err(Error::Unnormalized { .. })
        ));
    }

    /// A sign fault in the diffusion is caught by comparing against the
    /// closed-form success probability.
    #[test]
    fn faulted_diffusion_breaks_closed_form_agreement() {
        fn bad_diffuse(sv: &mut StateVector) {
            let mean = sv.amplitudes.iter().sum::<Complex64>() / sv.len() as f64;
            for amp in sv.amplitudes.iter_mut() {
                *amp = -2.0 * mean - *amp; // reflection with the mean sign flipped
            }
        }
        let oracle = SetOracle::new(8, [3]);
        let mut sv = StateVector::uniform(3).unwrap();
        sv.apply_oracle_phase(&oracle);
        bad_diffuse(&mut sv);
        let theta = (1.0f64 / 8.0).sqrt().asin();
        let expected = (3.0 * theta).sin().powi(2);
        assert!((sv.marked_probability(&oracle) - expected).abs() > 1e-10);
    }
}
