//! Quantum-query-model simulation of amplitude-amplification algorithms,
//! culminating in two k-minima selection strategies, with per-oracle query
//! accounting and a seeded benchmark harness.
//!
//! The crate is organized around four layers:
//!
//! - [`oracle`]: datasets, the strict `(value, index)` key order, the
//!   threshold / multi-threshold / exclusion oracle families, and the
//!   [`oracle::QueryLedger`] every complexity claim is measured against.
//! - [`sim`]: statevector and rotation-subspace backends for Grover dynamics,
//!   plus exact phase-estimation readout statistics.
//! - [`algorithms`]: amplitude amplification with known and unknown marked
//!   counts, threshold-descent minimum finding, quantum counting, threshold
//!   binary search, search-all-marked, and the two k-minima algorithms.
//! - [`mod@bench`]: deterministic seeded sweeps, aggregation, and CSV/JSON
//!   emission; [`verify`] bundles the invariant suites behind the CLI.

pub mod algorithms;
pub mod bench;
pub mod error;
pub mod oracle;
pub mod sim;
pub mod verify;

pub use error::{Error, Phase, Result};
