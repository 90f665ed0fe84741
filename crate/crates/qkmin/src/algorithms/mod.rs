//! The algorithm stack: amplitude amplification, minimum finding, counting,
//! threshold binary search, search-all-marked, and the k-minima algorithms.

pub mod counting;
pub mod kminima;
pub mod minimum;
pub mod search;

pub use counting::{
    qc_nominal_cost, quantum_count, resolution_qubits, threshold_binary_search, BracketResult,
    CountEstimate, QcMode,
};
pub use kminima::{
    conventional_budget, kminima_conventional, kminima_proposed, ConventionalConfig,
    KminimaOutcome, ProposedConfig, ProposedOutcome,
};
pub use minimum::{
    find_extremum, find_maximum, find_minimum, fm_query_budget, FmOutcome, FmTrace,
};
pub use search::{
    aa_search_known, aa_search_unknown, known_iterations, search_all_budget, search_all_marked,
    EMPTINESS_PASSES,
};

use serde::{Deserialize, Serialize};

use crate::sim::Backend;

/// Query consumption split by algorithm phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseQueries {
    /// Threshold-descent minimum search.
    pub find_minimum: u64,
    /// Counting / threshold binary search.
    pub counting: u64,
    /// Search-all-marked collection.
    pub search_all: u64,
}

impl PhaseQueries {
    pub fn total(&self) -> u64 {
        self.find_minimum + self.counting + self.search_all
    }
}

/// Outcome record of one algorithm run, the unit the bench layer aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub backend: Backend,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    /// Total oracle queries charged to the run's ledger.
    pub queries: u64,
    pub success: bool,
    /// Indices returned by the run, sorted.
    pub found: Vec<usize>,
    /// Wall time; zero unless timing capture was requested, so that seeded
    /// reports stay byte-stable.
    pub wall_ns: u64,
    /// Marked count actually collected by the proposed algorithm's final
    /// phase (k' >= k), when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kprime: Option<usize>,
    /// Count estimate, for counting runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_hat: Option<f64>,
    /// Retries consumed by a retrying wrapper.
    pub retries: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_queries: Option<PhaseQueries>,
}
