//! Indexed value stores and synthetic data generators.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::order::{Direction, KeyOrder};
use crate::error::{Error, Result};

/// Value distributions for synthetic datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataDistribution {
    /// Values drawn uniformly from [0, 1).
    Uniform,
    /// Standard-normal values.
    Gaussian,
    /// The integers 0..N-1 shuffled.
    Permutation,
    /// Values sorted in descending order, worst case for threshold descent.
    Adversarial,
}

impl std::fmt::Display for DataDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            DataDistribution::Uniform => "uniform",
            DataDistribution::Gaussian => "gaussian",
            DataDistribution::Permutation => "permutation",
            DataDistribution::Adversarial => "adversarial",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for DataDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(DataDistribution::Uniform),
            "gaussian" => Ok(DataDistribution::Gaussian),
            "permutation" => Ok(DataDistribution::Permutation),
            "adversarial" => Ok(DataDistribution::Adversarial),
            other => Err(Error::InvalidConfig(format!(
                "unknown distribution `{other}`"
            ))),
        }
    }
}

/// N indexed scalar values with a precomputed ascending rank table.
///
/// Indices are 0..N-1. The key order is the strict lexicographic order on
/// `(value, index)`, so all keys are distinct even when values repeat.
/// Quantum registers operate on the next power of two; the padding indices
/// `N..padded_len()` act as sentinels that no oracle ever marks.
#[derive(Debug, Clone)]
pub struct Dataset {
    values: Vec<f64>,
    /// `sorted[r]` is the index with ascending rank `r`.
    sorted: Vec<usize>,
    /// `rank[x]` is the number of indices strictly below `x` in ascending order.
    rank: Vec<usize>,
}

impl Dataset {
    /// Builds a dataset from raw values. Values must be finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDataset("dataset must be nonempty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "value at index {i} is not finite"
            )));
        }
        let mut sorted: Vec<usize> = (0..values.len()).collect();
        sorted.sort_by(|&a, &b| KeyOrder::ASCENDING.cmp((values[a], a), (values[b], b)));
        let mut rank = vec![0usize; values.len()];
        for (r, &x) in sorted.iter().enumerate() {
            rank[x] = r;
        }
        Ok(Dataset {
            values,
            sorted,
            rank,
        })
    }

    /// Deterministic synthetic dataset of size `n` for the given seed.
    pub fn generate(n: usize, dist: DataDistribution, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDataset("dataset must be nonempty".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = match dist {
            DataDistribution::Uniform => (0..n).map(|_| rng.random::<f64>()).collect(),
            DataDistribution::Gaussian => {
                (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
            }
            DataDistribution::Permutation => {
                let mut vals: Vec<f64> = (0..n).map(|v| v as f64).collect();
                vals.shuffle(&mut rng);
                vals
            }
            DataDistribution::Adversarial => (0..n).rev().map(|v| v as f64).collect(),
        };
        Dataset::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of qubits of the index register, at least 1.
    pub fn qubits(&self) -> u32 {
        let n = self.len().max(2);
        (n as u64).next_power_of_two().trailing_zeros()
    }

    /// Register size: `len()` rounded up to the next power of two (min 2).
    pub fn padded_len(&self) -> usize {
        1usize << self.qubits()
    }

    /// The value tied to index `x`.
    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(value, index)` key of `x`.
    pub fn key(&self, x: usize) -> (f64, usize) {
        (self.values[x], x)
    }

    /// Number of indices strictly below `t` under `order`.
    pub fn rank_under(&self, t: usize, order: KeyOrder) -> usize {
        match order.direction() {
            Direction::Ascending => self.rank[t],
            Direction::Descending => self.len() - 1 - self.rank[t],
        }
    }

    /// The index with rank `r` under `order` (rank 0 is the extreme element).
    pub fn index_at_rank(&self, r: usize, order: KeyOrder) -> usize {
        match order.direction() {
            Direction::Ascending => self.sorted[r],
            Direction::Descending => self.sorted[self.len() - 1 - r],
        }
    }

    /// The minimum index under `order` (classical reference answer).
    pub fn extreme(&self, order: KeyOrder) -> usize {
        self.index_at_rank(0, order)
    }

    /// The `k` smallest indices under `order`, in index order.
    pub fn smallest_k(&self, k: usize, order: KeyOrder) -> Vec<usize> {
        let mut out: Vec<usize> = (0..k.min(self.len()))
            .map(|r| self.index_at_rank(r, order))
            .collect();
        out.sort_unstable();
        out
    }

    /// Writes the dataset as CSV with an `index,value` header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v}")?;
        }
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Loads a dataset from `index,value` CSV, validating that the indices are
    /// exactly 0..N-1 in order.
    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines();
        match lines.next() {
            Some(header) => {
                let header = header?;
                if header.trim() != "index,value" {
                    return Err(Error::InvalidDataset(format!(
                        "expected header `index,value`, got `{}`",
                        header.trim()
                    )));
                }
            }
            None => return Err(Error::InvalidDataset("empty file".into())),
        }
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx_str, val_str) = line.split_once(',').ok_or_else(|| {
                Error::InvalidDataset(format!("row {}: expected `index,value`", lineno + 2))
            })?;
            let idx: usize = idx_str.trim().parse().map_err(|_| {
                Error::InvalidDataset(format!("row {}: bad index `{idx_str}`", lineno + 2))
            })?;
            if idx != values.len() {
                return Err(Error::InvalidDataset(format!(
                    "row {}: expected index {}, got {idx}",
                    lineno + 2,
                    values.len()
                )));
            }
            let val: f64 = val_str.trim().parse().map_err(|_| {
                Error::InvalidDataset(format!("row {}: bad value `{val_str}`", lineno + 2))
            })?;
            values.push(val);
        }
        Dataset::new(values)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Dataset::read_csv(std::fs::File::open(path)?)
    }
}
