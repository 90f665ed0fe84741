//! Crate-wide error type.

use thiserror::Error;

/// Phase of a multi-stage algorithm, used to attribute budget exhaustion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Threshold-descent minimum search.
    FindMinimum,
    /// Counting / threshold binary search.
    Counting,
    /// Exhaustive search for all marked indices.
    SearchAll,
    /// Greedy multi-threshold selection.
    Conventional,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Phase::FindMinimum => "find-minimum",
            Phase::Counting => "counting",
            Phase::SearchAll => "search-all",
            Phase::Conventional => "conventional",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{requested} qubits exceeds the statevector backend limit of {limit}")]
    QubitLimit { requested: u32, limit: u32 },

    #[error("qubit count must be at least 1")]
    ZeroQubits,

    #[error("marked count {marked} exceeds domain size {domain}")]
    MarkedCount { marked: usize, domain: usize },

    #[error("index {index} out of range for domain of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("state norm deviates from 1 by {deviation:.3e}")]
    Unnormalized { deviation: f64 },

    #[error("threshold set is empty")]
    EmptyThresholdSet,

    #[error("search requires at least one marked index (k = 0)")]
    NoMarkedIndices,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("query budget exhausted during {phase} phase ({found} indices found)")]
    BudgetExhausted {
        phase: Phase,
        /// Indices recovered before the budget ran out.
        partial: Vec<usize>,
        found: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Builds a budget-exhaustion error carrying the partial result.
    pub fn budget_exhausted(phase: Phase, partial: Vec<usize>) -> Self {
        let found = partial.len();
        Error::BudgetExhausted {
            phase,
            partial,
            found,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
