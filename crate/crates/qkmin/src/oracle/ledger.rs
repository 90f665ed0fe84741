//! Oracle query accounting.
//!
//! Every complexity claim in this crate is stated in black-box queries, not
//! gates. The ledger is the single counter those claims are measured against:
//! one increment per oracle application to the full register, one per
//! verification query after a measurement, and the fixed per-invocation cost
//! of phase estimation. Classical bookkeeping (maintaining threshold sets,
//! post-selecting found indices) never touches it.

use std::cell::Cell;

/// Monotone counter of oracle applications for a single run.
///
/// Ledgers are per-run and thread-confined; interior mutability lets oracles
/// and simulators share one ledger without threading `&mut` everywhere.
#[derive(Debug, Default)]
pub struct QueryLedger {
    count: Cell<u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total queries charged so far.
    pub fn count(&self) -> u64 {
        self.count.get()
    }

    /// Charges `queries` oracle applications.
    pub fn charge(&self, queries: u64) {
        self.count.set(self.count.get() + queries);
    }

    /// Queries charged since a previously recorded count.
    pub fn since(&self, start: u64) -> u64 {
        self.count.get() - start
    }
}
