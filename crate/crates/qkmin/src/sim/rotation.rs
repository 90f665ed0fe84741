//! Closed-form rotation-subspace backend.
//!
//! From a uniform start, Grover dynamics stay inside the 2-D plane spanned by
//! the normalized marked and unmarked superpositions, so the whole state is
//! one angle and an iteration count. Measurement draws the marked class with
//! probability sin^2((2j+1) theta) and then a uniform member of that class.
//! This is what makes large-domain sweeps cheap: every operation is O(1).

use rand::Rng;

use super::MeasurementOutcome;
use crate::error::{Error, Result};
use crate::oracle::Oracle;

/// Grover dynamics reduced to the marked/unmarked plane.
#[derive(Debug, Clone, Copy)]
pub struct RotationState {
    /// sin^2(theta) = marked / domain.
    theta: f64,
    /// Iterations applied so far.
    iterations: u64,
    domain: usize,
    marked: usize,
}

impl RotationState {
    /// State equivalent to the uniform superposition over `domain` indices of
    /// which `marked` are marked.
    pub fn uniform(domain: usize, marked: usize) -> Result<Self> {
        if marked > domain {
            return Err(Error::MarkedCount { marked, domain });
        }
        let theta = (marked as f64 / domain as f64).sqrt().asin();
        Ok(RotationState {
            theta,
            iterations: 0,
            domain,
            marked,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    /// Applies `j` Grover iterations; charges `j` queries.
    pub fn grover_iterate<O: Oracle>(&mut self, oracle: &O, j: u64) {
        debug_assert_eq!(oracle.marked_count(), self.marked);
        oracle.ledger().charge(j);
        self.iterations += j;
    }

    /// Total amplitude weight of the marked and unmarked classes:
    /// (sin((2j+1) theta), cos((2j+1) theta)).
    pub fn class_weights(&self) -> (f64, f64) {
        let angle = (2 * self.iterations + 1) as f64 * self.theta;
        (angle.sin(), angle.cos())
    }

    /// Probability of measuring a marked index.
    pub fn marked_probability(&self) -> f64 {
        if self.marked == 0 {
            return 0.0;
        }
        if self.marked == self.domain {
            return 1.0;
        }
        self.class_weights().0.powi(2)
    }

    /// Samples an index: the marked class with probability
    /// sin^2((2j+1) theta) and a uniform member within the class.
    pub fn measure<O: Oracle, R: Rng>(&self, oracle: &O, rng: &mut R) -> MeasurementOutcome {
        debug_assert_eq!(oracle.marked_count(), self.marked);
        let hit_marked = match self.marked {
            0 => false,
            m if m == self.domain => true,
            _ => rng.random_bool(self.marked_probability()),
        };
        if hit_marked {
            let r = rng.random_range(0..self.marked);
            let index = oracle
                .nth_marked(r)
                .expect("rank within the marked count resolves");
            MeasurementOutcome {
                index,
                was_marked: true,
            }
        } else {
            // Unmarked indices dominate in every regime this backend serves,
            // so rejection sampling terminates quickly.
            loop {
                let index = rng.random_range(0..self.domain);
                if !oracle.marks(index) {
                    return MeasurementOutcome {
                        index,
                        was_marked: false,
                    };
                }
            }
        }
    }
}
