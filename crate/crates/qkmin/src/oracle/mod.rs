//! Oracles over index registers and their query accounting.
//!
//! An oracle is a boolean predicate over basis indices; applying it to the
//! full register costs one query on the run's [`QueryLedger`]. Three families
//! cover every algorithm here: a single-threshold comparison, a
//! multi-threshold comparison against one selected member, and an exclusion
//! wrapper that unmarks already-found indices.
//!
//! Simulators are "nature": they may inspect the marked set (counts, ranked
//! members) without charging queries. Charges are driven entirely by the
//! algorithms' oracle applications.

mod dataset;
mod ledger;
mod order;

pub use dataset::{DataDistribution, Dataset};
pub use ledger::QueryLedger;
pub use order::{Direction, KeyOrder};

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};

/// A counted boolean predicate over a power-of-two index register.
pub trait Oracle {
    /// Register size, always a power of two. Indices at or beyond the real
    /// dataset length are padding sentinels and are never marked.
    fn domain_size(&self) -> usize;

    /// Uncharged basis predicate; simulation-side only.
    fn marks(&self, x: usize) -> bool;

    /// Number of marked indices.
    fn marked_count(&self) -> usize;

    /// The marked index with rank `r` in this oracle's canonical marked
    /// ordering, if `r < marked_count()`.
    fn nth_marked(&self, r: usize) -> Option<usize>;

    /// Rank of `x` within the canonical marked ordering, if marked.
    fn marked_rank(&self, x: usize) -> Option<usize>;

    /// Ledger the oracle charges its applications to.
    fn ledger(&self) -> &QueryLedger;

    /// One charged oracle query on a single index.
    fn evaluate(&self, x: usize) -> Result<bool> {
        if x >= self.domain_size() {
            return Err(Error::IndexOutOfRange {
                index: x,
                len: self.domain_size(),
            });
        }
        self.ledger().charge(1);
        Ok(self.marks(x))
    }

    /// Charged verification query on a measured index.
    fn verify(&self, x: usize) -> bool {
        self.ledger().charge(1);
        self.marks(x)
    }
}

impl<T: Oracle + ?Sized> Oracle for &T {
    fn domain_size(&self) -> usize {
        (**self).domain_size()
    }
    fn marks(&self, x: usize) -> bool {
        (**self).marks(x)
    }
    fn marked_count(&self) -> usize {
        (**self).marked_count()
    }
    fn nth_marked(&self, r: usize) -> Option<usize> {
        (**self).nth_marked(r)
    }
    fn marked_rank(&self, x: usize) -> Option<usize> {
        (**self).marked_rank(x)
    }
    fn ledger(&self) -> &QueryLedger {
        (**self).ledger()
    }
}

/// Marks indices whose key lies strictly below a threshold key.
///
/// `threshold == None` is the virtual sentinel whose key sits above every
/// real key, so every real index is marked; it backs the bracket search when
/// even the first recorded threshold already marks too few indices.
pub struct ThresholdOracle<'a> {
    dataset: &'a Dataset,
    order: KeyOrder,
    threshold: Option<usize>,
    ledger: &'a QueryLedger,
}

impl<'a> ThresholdOracle<'a> {
    pub fn new(
        dataset: &'a Dataset,
        threshold: usize,
        order: KeyOrder,
        ledger: &'a QueryLedger,
    ) -> Result<Self> {
        if threshold >= dataset.len() {
            return Err(Error::IndexOutOfRange {
                index: threshold,
                len: dataset.len(),
            });
        }
        Ok(ThresholdOracle {
            dataset,
            order,
            threshold: Some(threshold),
            ledger,
        })
    }

    /// Sentinel oracle marking every real index.
    pub fn above_all(dataset: &'a Dataset, order: KeyOrder, ledger: &'a QueryLedger) -> Self {
        ThresholdOracle {
            dataset,
            order,
            threshold: None,
            ledger,
        }
    }

    pub fn threshold(&self) -> Option<usize> {
        self.threshold
    }
}

impl Oracle for ThresholdOracle<'_> {
    fn domain_size(&self) -> usize {
        self.dataset.padded_len()
    }

    fn marks(&self, x: usize) -> bool {
        if x >= self.dataset.len() {
            return false;
        }
        match self.threshold {
            Some(t) => self.order.less(self.dataset.key(x), self.dataset.key(t)),
            None => true,
        }
    }

    fn marked_count(&self) -> usize {
        match self.threshold {
            Some(t) => self.dataset.rank_under(t, self.order),
            None => self.dataset.len(),
        }
    }

    fn nth_marked(&self, r: usize) -> Option<usize> {
        (r < self.marked_count()).then(|| self.dataset.index_at_rank(r, self.order))
    }

    fn marked_rank(&self, x: usize) -> Option<usize> {
        self.marks(x).then(|| self.dataset.rank_under(x, self.order))
    }

    fn ledger(&self) -> &QueryLedger {
        self.ledger
    }
}

/// Marks indices below one selected member of a threshold set, excluding the
/// set itself so found indices are never re-proposed.
pub struct MultiThresholdOracle<'a> {
    dataset: &'a Dataset,
    order: KeyOrder,
    selected: usize,
    ledger: &'a QueryLedger,
    thresholds: &'a BTreeSet<usize>,
    /// Ascending ranks (within the marked region) of excluded thresholds.
    skip: Vec<usize>,
}

impl<'a> MultiThresholdOracle<'a> {
    pub fn new(
        dataset: &'a Dataset,
        thresholds: &'a BTreeSet<usize>,
        selected: usize,
        order: KeyOrder,
        ledger: &'a QueryLedger,
    ) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::EmptyThresholdSet);
        }
        if !thresholds.contains(&selected) {
            return Err(Error::InvalidConfig(
                "selected threshold must be a member of the threshold set".into(),
            ));
        }
        let below = dataset.rank_under(selected, order);
        let mut skip: Vec<usize> = thresholds
            .iter()
            .map(|&t| dataset.rank_under(t, order))
            .filter(|&r| r < below)
            .collect();
        skip.sort_unstable();
        Ok(MultiThresholdOracle {
            dataset,
            order,
            selected,
            ledger,
            thresholds,
            skip,
        })
    }

    pub fn selected(&self) -> usize {
        self.selected
    }
}

impl Oracle for MultiThresholdOracle<'_> {
    fn domain_size(&self) -> usize {
        self.dataset.padded_len()
    }

    fn marks(&self, x: usize) -> bool {
        x < self.dataset.len()
            && !self.thresholds.contains(&x)
            && self
                .order
                .less(self.dataset.key(x), self.dataset.key(self.selected))
    }

    fn marked_count(&self) -> usize {
        self.dataset.rank_under(self.selected, self.order) - self.skip.len()
    }

    fn nth_marked(&self, r: usize) -> Option<usize> {
        (r < self.marked_count()).then(|| {
            self.dataset
                .index_at_rank(skip_adjust(&self.skip, r), self.order)
        })
    }

    fn marked_rank(&self, x: usize) -> Option<usize> {
        self.marks(x).then(|| {
            let base = self.dataset.rank_under(x, self.order);
            base - self.skip.partition_point(|&s| s < base)
        })
    }

    fn ledger(&self) -> &QueryLedger {
        self.ledger
    }
}

/// Wraps a base oracle, unmarking a growing set of already-found indices.
pub struct ExclusionOracle<'a, B: Oracle> {
    base: &'a B,
    excluded: BTreeSet<usize>,
    /// Base-marked ranks of the excluded indices, sorted.
    skip: Vec<usize>,
}

impl<'a, B: Oracle> ExclusionOracle<'a, B> {
    pub fn new(base: &'a B, excluded: impl IntoIterator<Item = usize>) -> Self {
        let mut oracle = ExclusionOracle {
            base,
            excluded: BTreeSet::new(),
            skip: Vec::new(),
        };
        for x in excluded {
            oracle.exclude(x);
        }
        oracle
    }

    /// Adds `x` to the excluded set.
    pub fn exclude(&mut self, x: usize) {
        if self.excluded.insert(x) {
            if let Some(r) = self.base.marked_rank(x) {
                let at = self.skip.partition_point(|&s| s < r);
                self.skip.insert(at, r);
            }
        }
    }

    pub fn excluded(&self) -> &BTreeSet<usize> {
        &self.excluded
    }
}

impl<B: Oracle> Oracle for ExclusionOracle<'_, B> {
    fn domain_size(&self) -> usize {
        self.base.domain_size()
    }

    fn marks(&self, x: usize) -> bool {
        self.base.marks(x) && !self.excluded.contains(&x)
    }

    fn marked_count(&self) -> usize {
        self.base.marked_count() - self.skip.len()
    }

    fn nth_marked(&self, r: usize) -> Option<usize> {
        (r < self.marked_count()).then(|| {
            self.base
                .nth_marked(skip_adjust(&self.skip, r))
                .expect("adjusted rank is within the base marked count")
        })
    }

    fn marked_rank(&self, x: usize) -> Option<usize> {
        if self.excluded.contains(&x) {
            return None;
        }
        let base = self.base.marked_rank(x)?;
        Some(base - self.skip.partition_point(|&s| s < base))
    }

    fn ledger(&self) -> &QueryLedger {
        self.base.ledger()
    }
}

/// Explicit marked set over a power-of-two domain; the workhorse of tests.
pub struct SetOracle {
    domain: usize,
    sorted: Vec<usize>,
    ledger: QueryLedger,
}

impl SetOracle {
    /// `domain` is rounded up to a power of two (minimum 2).
    pub fn new(domain: usize, marked: impl IntoIterator<Item = usize>) -> Self {
        let domain = domain.next_power_of_two().max(2);
        let set: BTreeSet<usize> = marked.into_iter().collect();
        assert!(
            set.iter().all(|&x| x < domain),
            "marked indices must lie in the domain"
        );
        SetOracle {
            domain,
            sorted: set.into_iter().collect(),
            ledger: QueryLedger::new(),
        }
    }
}

impl Oracle for SetOracle {
    fn domain_size(&self) -> usize {
        self.domain
    }

    fn marks(&self, x: usize) -> bool {
        self.sorted.binary_search(&x).is_ok()
    }

    fn marked_count(&self) -> usize {
        self.sorted.len()
    }

    fn nth_marked(&self, r: usize) -> Option<usize> {
        self.sorted.get(r).copied()
    }

    fn marked_rank(&self, x: usize) -> Option<usize> {
        self.sorted.binary_search(&x).ok()
    }

    fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }
}

/// Maps rank `r` in the filtered ordering to the underlying rank, skipping
/// the sorted excluded ranks.
fn skip_adjust(skip: &[usize], r: usize) -> usize {
    let mut adjusted = r;
    for &s in skip {
        if s <= adjusted {
            adjusted += 1;
        } else {
            break;
        }
    }
    adjusted
}

/// Exact marked set of a threshold: classical reference oracle for tests.
/// Scans every index directly and never touches a ledger.
pub fn marked_set(dataset: &Dataset, t: usize, order: KeyOrder) -> Result<BTreeSet<usize>> {
    if t >= dataset.len() {
        return Err(Error::IndexOutOfRange {
            index: t,
            len: dataset.len(),
        });
    }
    let tk = dataset.key(t);
    Ok((0..dataset.len())
        .filter(|&x| order.less(dataset.key(x), tk))
        .collect())
}

/// How the working threshold is chosen from a threshold set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// Uniformly random member.
    Random,
    /// The member with the largest key: the favorable case.
    Max,
    /// The member with the smallest key: the stated worst case.
    Min,
}

impl std::fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SelectionStrategy::Random => "random",
            SelectionStrategy::Max => "max",
            SelectionStrategy::Min => "min",
        };
        f.write_str(name)
    }
}

/// Picks a threshold from `set` per `strategy` under `order`. Max/min are
/// deterministic; random is driven by the seeded generator.
pub fn select_threshold<R: Rng>(
    set: &BTreeSet<usize>,
    strategy: SelectionStrategy,
    order: KeyOrder,
    dataset: &Dataset,
    rng: &mut R,
) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::EmptyThresholdSet);
    }
    let pick = match strategy {
        SelectionStrategy::Random => {
            let i = rng.random_range(0..set.len());
            *set.iter().nth(i).expect("index is in range")
        }
        SelectionStrategy::Max => *set
            .iter()
            .max_by(|&&a, &&b| order.cmp(dataset.key(a), dataset.key(b)))
            .expect("set is nonempty"),
        SelectionStrategy::Min => *set
            .iter()
            .min_by(|&&a, &&b| order.cmp(dataset.key(a), dataset.key(b)))
            .expect("set is nonempty"),
    };
    Ok(pick)
}
