//! Seeded experiment sweeps with deterministic, machine-readable outputs.
//!
//! A sweep is a grid of (algorithm, N, k) cells, each executing a fixed
//! number of trials whose seeds derive from hash(master seed, cell id,
//! trial index). Trials may run in parallel; aggregation folds the recorded
//! reports in trial-index order, so identical configurations produce
//! identical bytes no matter the thread count.

pub mod runner;
pub mod stats;

pub use runner::{run_trial, AlgorithmId, BudgetMultipliers, TrialSpec};
pub use stats::{derive_seed, fit_loglog_slope, percentile_sorted, trial_seed, SlopeFit};

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{QcMode, RunReport};
use crate::error::{Error, Result};
use crate::oracle::{DataDistribution, SelectionStrategy};
use crate::sim::Backend;

/// Output encodings for sweep results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// One full sweep description; the on-disk config is this struct as a JSON
/// document with lowercase snake_case keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub algorithms: Vec<AlgorithmId>,
    pub n_grid: Vec<usize>,
    pub k_grid: Vec<usize>,
    pub distribution: DataDistribution,
    pub trials: usize,
    pub master_seed: u64,
    pub backend: Backend,
    pub qc_mode: QcMode,
    pub output: String,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "default_strategy")]
    pub strategy: SelectionStrategy,
    #[serde(default)]
    pub budget_multipliers: BudgetMultipliers,
    #[serde(default)]
    pub counting_qubits: Option<u32>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default)]
    pub charge_argmax: bool,
    /// Capture wall times (makes outputs run-dependent; off by default).
    #[serde(default)]
    pub record_wall: bool,
    /// Optional path for per-trial reports as JSON lines.
    #[serde(default)]
    pub trial_log: Option<String>,
}

fn default_strategy() -> SelectionStrategy {
    SelectionStrategy::Max
}

fn default_retries() -> u32 {
    3
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("algorithms: grid is empty".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::InvalidConfig("n_grid: grid is empty".into()));
        }
        if self.k_grid.is_empty() {
            return Err(Error::InvalidConfig("k_grid: grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials: must be at least 1".into()));
        }
        Ok(())
    }

    /// All runnable cells in deterministic order, skipping k > n combinations.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &algorithm in &self.algorithms {
            for &n in &self.n_grid {
                for &k in &self.k_grid {
                    if k <= n {
                        cells.push(Cell { algorithm, n, k });
                    }
                }
            }
        }
        cells
    }

    fn trial_spec(&self, cell: &Cell) -> TrialSpec {
        TrialSpec {
            algorithm: cell.algorithm,
            n: cell.n,
            k: cell.k,
            dist: self.distribution,
            backend: self.backend,
            qc_mode: self.qc_mode,
            strategy: self.strategy,
            budget_multipliers: self.budget_multipliers,
            counting_qubits: self.counting_qubits,
            max_retries: self.max_retries,
            charge_argmax: self.charge_argmax,
            record_wall: self.record_wall,
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub algorithm: AlgorithmId,
    pub n: usize,
    pub k: usize,
}

impl Cell {
    /// Stable identifier feeding per-trial seed derivation.
    pub fn id(&self, dist: DataDistribution, backend: Backend) -> String {
        format!("{}/{}/{}/n{}/k{}", self.algorithm, dist, backend, self.n, self.k)
    }
}

/// Aggregated statistics of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub algo: AlgorithmId,
    pub backend: Backend,
    pub dist: DataDistribution,
    pub n: usize,
    pub k: usize,
    /// Master seed of the sweep the cell belongs to.
    pub seed: u64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub median_queries: f64,
    pub p95_queries: f64,
    /// Mean k'/k over trials that report k'; 1.0 where not applicable.
    pub mean_kprime_ratio: f64,
    pub mean_wall_ns: f64,
}

/// Aggregates recorded reports in trial-index order.
fn aggregate(cell: &Cell, config: &SweepConfig, reports: &[RunReport]) -> CellStats {
    let trials = reports.len();
    let successes = reports.iter().filter(|r| r.success).count();
    let mut queries: Vec<u64> = reports.iter().map(|r| r.queries).collect();
    let mean_queries = queries.iter().sum::<u64>() as f64 / trials as f64;
    queries.sort_unstable();
    let ratios: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.kprime.map(|kp| kp as f64 / r.k.max(1) as f64))
        .collect();
    let mean_kprime_ratio = if ratios.is_empty() {
        1.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    CellStats {
        algo: cell.algorithm,
        backend: config.backend,
        dist: config.distribution,
        n: cell.n,
        k: cell.k,
        seed: config.master_seed,
        trials,
        success_rate: successes as f64 / trials as f64,
        mean_queries,
        median_queries: percentile_sorted(&queries, 0.5),
        p95_queries: percentile_sorted(&queries, 0.95),
        mean_kprime_ratio,
        mean_wall_ns: reports.iter().map(|r| r.wall_ns).sum::<u64>() as f64 / trials as f64,
    }
}

/// Executes every trial of one cell (in parallel) and aggregates.
pub fn run_cell(config: &SweepConfig, cell: &Cell) -> Result<CellStats> {
    let reports = run_cell_reports(config, cell)?;
    Ok(aggregate(cell, config, &reports))
}

/// Per-trial reports of one cell in trial order.
pub fn run_cell_reports(config: &SweepConfig, cell: &Cell) -> Result<Vec<RunReport>> {
    let spec = config.trial_spec(cell);
    let id = cell.id(config.distribution, config.backend);
    (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| run_trial(&spec, trial_seed(config.master_seed, &id, trial), None))
        .collect()
}

/// Runs the whole sweep; cells execute in deterministic order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<CellStats>> {
    config.validate()?;
    let cells = config.cells();
    let mut trial_log = match &config.trial_log {
        Some(path) => Some(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => None,
    };
    let mut stats = Vec::with_capacity(cells.len());
    for cell in &cells {
        let reports = run_cell_reports(config, cell)?;
        if let Some(log) = trial_log.as_mut() {
            for report in &reports {
                let line = serde_json::to_string(report)
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?;
                writeln!(log, "{line}")?;
            }
        }
        stats.push(aggregate(cell, config, &reports));
    }
    Ok(stats)
}

/// The fixed CSV header.
pub const CSV_HEADER: &str = "algo,backend,dist,N,k,seed,trials,success_rate,mean_queries,\
median_queries,p95_queries,mean_kprime_ratio,mean_wall_ns";

/// Renders cell statistics as CSV, byte-stable for identical inputs.
pub fn emit_csv(stats: &[CellStats]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.algo,
            s.backend,
            s.dist,
            s.n,
            s.k,
            s.seed,
            s.trials,
            s.success_rate,
            s.mean_queries,
            s.median_queries,
            s.p95_queries,
            s.mean_kprime_ratio,
            s.mean_wall_ns
        ));
    }
    out
}

/// Renders cell statistics as pretty JSON mirroring the CSV fields.
pub fn emit_json(stats: &[CellStats]) -> String {
    let mut out = serde_json::to_string_pretty(stats).expect("stats serialize");
    out.push('\n');
    out
}

/// Writes results in the configured format; `-` streams to stdout.
pub fn emit_results(stats: &[CellStats], format: OutputFormat, output: &str) -> Result<()> {
    let rendered = match format {
        OutputFormat::Csv => emit_csv(stats),
        OutputFormat::Json => emit_json(stats),
    };
    if output == "-" {
        std::io::stdout().write_all(rendered.as_bytes())?;
    } else {
        std::fs::write(output, rendered)?;
    }
    Ok(())
}
