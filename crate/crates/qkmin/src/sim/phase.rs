//! Phase estimation on the Grover operator.
//!
//! The Grover operator for a marked fraction sin^2(theta) has the conjugate
//! eigenphase pair +-2 theta, so a p-qubit phase estimation started from the
//! uniform state samples an equal mixture of two standard kernels centered at
//! +-2^p * theta / pi. Simulating in that 2-D eigenspace gives exact readout
//! statistics without a 2^(n+p) statevector.
//!
//! Readings are folded to the lower half-spectrum `min(y, 2^p - y)`: the two
//! branches are mirror images and the count estimate N sin^2(pi y / 2^p) is
//! fold-invariant, which also makes dyadic eigenphases deterministic.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::QueryLedger;

/// Queries charged by one p-qubit estimation: controlled Grover powers
/// 2^0..2^(p-1), each power 2^s costing 2^s queries.
pub fn estimation_cost(p: u32) -> u64 {
    (1u64 << p) - 1
}

/// The p-qubit estimation kernel K_p evaluated at a real offset `d`,
/// sin^2(pi d) / (2^(2p) sin^2(pi d / 2^p)), with the limit value 1 at
/// d == 0 (mod 2^p).
fn kernel(p: u32, d: f64) -> f64 {
    let m = (1u64 << p) as f64;
    let denom = (PI * d / m).sin();
    if denom.abs() < 1e-9 {
        return 1.0;
    }
    let num = (PI * d).sin();
    (num / (m * denom)).powi(2)
}

/// Exact readout distribution of phase estimation on the Grover operator.
pub struct PhaseKernel {
    p: u32,
    /// Folded pmf over y in 0..=2^(p-1).
    pmf: Vec<f64>,
}

impl PhaseKernel {
    /// Builds the distribution for `marked` marked indices out of `domain`.
    pub fn new(domain: usize, marked: usize, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidConfig(
                "phase estimation needs at least one counting qubit".into(),
            ));
        }
        if marked > domain {
            return Err(Error::MarkedCount { marked, domain });
        }
        let theta = (marked as f64 / domain as f64).sqrt().asin();
        let center = (1u64 << p) as f64 * theta / PI; // 2^p * phi
        let size = 1usize << p;
        let half = size / 2;

        let raw = |y: usize| {
            let d = y as f64;
            0.5 * kernel(p, d - center) + 0.5 * kernel(p, d + center)
        };
        // Fold: pmf[y] = raw(y) + raw(2^p - y) for interior y.
        let mut pmf = vec![0.0; half + 1];
        for (y, slot) in pmf.iter_mut().enumerate() {
            *slot = raw(y);
            if y != 0 && y != half {
                *slot += raw(size - y);
            }
        }
        let total: f64 = pmf.iter().sum();
        debug_assert!((total - 1.0).abs() < 1e-9, "pmf mass {total}");
        for v in pmf.iter_mut() {
            *v /= total;
        }
        Ok(PhaseKernel { p, pmf })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Probability of the folded reading `y`.
    pub fn prob(&self, y: u64) -> f64 {
        self.pmf.get(y as usize).copied().unwrap_or(0.0)
    }

    /// All folded readings with their probabilities.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Draws one folded reading.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (y, &pr) in self.pmf.iter().enumerate() {
            acc += pr;
            if u < acc {
                return y as u64;
            }
        }
        (self.pmf.len() - 1) as u64
    }

    /// Count estimate implied by a reading: domain * sin^2(pi y / 2^p).
    pub fn count_estimate(&self, domain: usize, y: u64) -> f64 {
        let m = (1u64 << self.p) as f64;
        domain as f64 * (PI * y as f64 / m).sin().powi(2)
    }
}

/// One phase-estimation reading, charged to the ledger.
pub fn phase_estimate_grover<R: Rng>(
    domain: usize,
    marked: usize,
    p: u32,
    ledger: &QueryLedger,
    rng: &mut R,
) -> Result<u64> {
    let kernel = PhaseKernel::new(domain, marked, p)?;
    ledger.charge(estimation_cost(p));
    Ok(kernel.sample(rng))
}
