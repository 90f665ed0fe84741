//! Command-line front end: single runs, sweeps, the invariant suites, and
//! dataset generation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qkmin::algorithms::QcMode;
use qkmin::bench::{
    emit_results, run_cell, run_sweep, run_trial, AlgorithmId, Cell, OutputFormat, SweepConfig,
    TrialSpec,
};
use qkmin::oracle::{DataDistribution, Dataset, SelectionStrategy};
use qkmin::sim::{Backend, MAX_STATEVECTOR_QUBITS};
use qkmin::verify;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_ALGORITHM_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qkmin",
    version,
    about = "Quantum-query-model search and k-minima simulation harness",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one algorithm and print its report as JSON.
    Run(RunArgs),
    /// Execute a sweep config and emit aggregated results.
    Sweep(SweepArgs),
    /// Run the invariant suites and print one pass/fail line per suite.
    Verify(VerifyArgs),
    /// Generate a dataset CSV (`index,value`).
    GenData(GenDataArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm: grover|aa-unknown|fm|fmax|count|search-all|kmin-conv|kmin-prop
    #[arg(long, value_parser = parse_algorithm)]
    algo: AlgorithmId,
    /// Dataset size.
    #[arg(long)]
    n: usize,
    /// Target count (marked set size / minima count) [default: 1]
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Value distribution: uniform|gaussian|permutation|adversarial
    #[arg(long, default_value = "permutation", value_parser = parse_dist)]
    dist: DataDistribution,
    /// Master seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Backend: statevector|analytic
    #[arg(long, default_value = "analytic", value_parser = parse_backend)]
    backend: Backend,
    /// Counting mode: sampled|exact
    #[arg(long = "qc-mode", default_value = "exact", value_parser = parse_qc_mode)]
    qc_mode: QcMode,
    /// Threshold selection for kmin-conv: random|max|min
    #[arg(long, default_value = "max", value_parser = parse_strategy)]
    strategy: SelectionStrategy,
    /// Counting qubits; defaults to enough for ~1/2 count resolution.
    #[arg(long)]
    p: Option<u32>,
    /// Retries after self-detected failures (kmin-prop).
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Number of seeded trials; above 1 an aggregate is printed.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Load the dataset from CSV instead of generating it.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Also write the printed JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall times (makes reports run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Path to a sweep config (JSON document, lowercase snake_case keys).
    config: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smaller grids, finishes well under a minute.
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "uniform", value_parser = parse_dist)]
    dist: DataDistribution,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

fn parse_algorithm(s: &str) -> Result<AlgorithmId, String> {
    AlgorithmId::from_str(s).map_err(|e| e.to_string())
}

fn parse_dist(s: &str) -> Result<DataDistribution, String> {
    DataDistribution::from_str(s).map_err(|e| e.to_string())
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    Backend::from_str(s).map_err(|e| e.to_string())
}

fn parse_qc_mode(s: &str) -> Result<QcMode, String> {
    QcMode::from_str(s).map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<SelectionStrategy, String> {
    match s {
        "random" => Ok(SelectionStrategy::Random),
        "max" => Ok(SelectionStrategy::Max),
        "min" => Ok(SelectionStrategy::Min),
        other => Err(format!("unknown strategy `{other}`")),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("QKMIN_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::GenData(args) => cmd_gen_data(args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<u8, String> {
    if args.n == 0 {
        return Err("--n must be at least 1".into());
    }
    if args.backend == Backend::Statevector {
        let padded = args.n.next_power_of_two().max(2);
        if padded.trailing_zeros() > MAX_STATEVECTOR_QUBITS {
            return Err(format!(
                "--backend statevector supports at most {} qubits (n <= {}); use --backend analytic",
                MAX_STATEVECTOR_QUBITS,
                1usize << MAX_STATEVECTOR_QUBITS
            ));
        }
    }
    if args.algo == AlgorithmId::Grover && args.k == 0 {
        return Err("--algo grover requires --k >= 1".into());
    }
    if args.k > args.n {
        return Err(format!("--k {} exceeds --n {}", args.k, args.n));
    }

    if args.data.is_some() && args.trials > 1 {
        return Err("--data applies to single trials; multi-trial runs generate per-trial datasets from the seed".into());
    }
    let dataset = match &args.data {
        Some(path) => Some(Dataset::read_csv_path(path).map_err(|e| e.to_string())?),
        None => None,
    };
    let spec = TrialSpec {
        algorithm: args.algo,
        n: dataset.as_ref().map_or(args.n, Dataset::len),
        k: args.k,
        dist: args.dist,
        backend: args.backend,
        qc_mode: args.qc_mode,
        strategy: args.strategy,
        budget_multipliers: Default::default(),
        counting_qubits: args.p,
        max_retries: args.retries,
        charge_argmax: false,
        record_wall: args.timings,
    };

    if args.trials <= 1 {
        let report = run_trial(&spec, args.seed, dataset.as_ref()).map_err(|e| e.to_string())?;
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        println!("{text}");
        if let Some(out) = &args.out {
            if out.as_os_str() != "-" {
                std::fs::write(out, format!("{text}\n")).map_err(|e| e.to_string())?;
            }
        }
        Ok(if report.success {
            EXIT_OK
        } else {
            EXIT_ALGORITHM_FAILURE
        })
    } else {
        let config = SweepConfig {
            algorithms: vec![args.algo],
            n_grid: vec![spec.n],
            k_grid: vec![args.k],
            distribution: args.dist,
            trials: args.trials,
            master_seed: args.seed,
            backend: args.backend,
            qc_mode: args.qc_mode,
            output: "-".into(),
            format: OutputFormat::Json,
            strategy: args.strategy,
            budget_multipliers: Default::default(),
            counting_qubits: args.p,
            max_retries: args.retries,
            charge_argmax: false,
            record_wall: args.timings,
            trial_log: None,
        };
        let cell = Cell {
            algorithm: args.algo,
            n: spec.n,
            k: args.k,
        };
        let stats = run_cell(&config, &cell).map_err(|e| e.to_string())?;
        let text = serde_json::to_string_pretty(&stats).map_err(|e| e.to_string())?;
        println!("{text}");
        if let Some(out) = &args.out {
            if out.as_os_str() != "-" {
                std::fs::write(out, format!("{text}\n")).map_err(|e| e.to_string())?;
            }
        }
        Ok(EXIT_OK)
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, String> {
    let config = SweepConfig::from_path(&args.config).map_err(|e| e.to_string())?;
    let stats = run_sweep(&config).map_err(|e| e.to_string())?;
    emit_results(&stats, config.format, &config.output).map_err(|e| e.to_string())?;
    if config.output != "-" {
        println!(
            "{:<11} {:>7} {:>5} {:>8} {:>14} {:>14}",
            "algo", "N", "k", "success", "mean_queries", "p95_queries"
        );
        for s in &stats {
            println!(
                "{:<11} {:>7} {:>5} {:>8.3} {:>14.1} {:>14.1}",
                s.algo.to_string(),
                s.n,
                s.k,
                s.success_rate,
                s.mean_queries,
                s.p95_queries
            );
        }
        println!("wrote {} cells to {}", stats.len(), config.output);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    let reports = verify::run_all(args.quick).map_err(|e| e.to_string())?;
    let mut all_passed = true;
    for report in &reports {
        let status = if report.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", report.name, report.details);
        all_passed &= report.passed;
    }
    Ok(if all_passed {
        EXIT_OK
    } else {
        EXIT_ALGORITHM_FAILURE
    })
}

fn cmd_gen_data(args: GenDataArgs) -> Result<u8, String> {
    if args.n == 0 {
        return Err("--n must be at least 1".into());
    }
    let dataset =
        Dataset::generate(args.n, args.dist, args.seed).map_err(|e| e.to_string())?;
    if args.out == "-" {
        dataset
            .write_csv(std::io::stdout().lock())
            .map_err(|e| e.to_string())?;
    } else {
        dataset
            .write_csv_path(&args.out)
            .map_err(|e| e.to_string())?;
    }
    Ok(EXIT_OK)
}
