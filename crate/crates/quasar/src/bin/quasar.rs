//! Command-line front end for paired sparse-aperture imaging
//! experiments.
//!
//! Exit codes: 0 success, 1 partial failure (some sweep points failed or
//! a report check did not verify), 2 config error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quasar::experiment::{
    global_rmse, has_errors, rate_tag, run_experiment, validate_config, ExperimentConfig,
    ExperimentError, RunSummary,
};
use quasar::io::read_complex_matrix;

#[derive(Parser)]
#[command(
    name = "quasar",
    version,
    about = "Paired classical/quantum sparse-aperture imaging experiments",
    after_help = "Configs are TOML; start from a preset with `run --preset f16-like` or dump \
                  one as a template via `validate --preset f16-like --print`."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigSource {
    /// Config file (TOML).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped preset: f16-like or yak42-like.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Parent directory for the run's artifacts (overrides the config).
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the sweep; 0 means the library default.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Print the effective config as TOML after validating.
    #[arg(long)]
    print: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write one artifact directory.
    Run(RunArgs),
    /// Check a config and print diagnostics without running anything.
    Validate(ValidateArgs),
    /// Re-verify a finished run directory against its own data dumps.
    Report {
        /// Run directory (the one containing results.csv).
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (e.g. `quasar ... | head`) instead of
    // panicking when a print hits EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Validate(args) => validate(args),
        Command::Report { dir } => report(&dir),
    }
}

fn load_config(source: &ConfigSource) -> Result<ExperimentConfig, String> {
    match (&source.config, &source.preset) {
        (Some(path), None) => ExperimentConfig::load(path).map_err(|e| e.to_string()),
        (None, Some(name)) => ExperimentConfig::preset(name).ok_or_else(|| {
            format!(
                "unknown preset {name:?}; available: {}",
                ExperimentConfig::preset_names().join(", ")
            )
        }),
        (None, None) => Err("provide --config <FILE> or --preset <NAME>".into()),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let mut config = match load_config(&args.source) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = args.output_dir {
        config.output_dir = Some(dir);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    match run_experiment(&config) {
        Ok(summary) => {
            print_summary(&summary);
            if summary.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(ExperimentError::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn print_summary(summary: &RunSummary) {
    for row in &summary.rows {
        let mut line = format!("rate {} {}: rmse {:e}", row.rate, row.method, row.rmse);
        if let Some(p1) = row.p1 {
            line.push_str(&format!(", p1 {p1:.4}"));
        }
        if let Some(p) = &row.registers {
            line.push_str(&format!(
                ", registers S=1 A={} B=1 C={} I={} (total {})",
                p.n_a,
                p.n_c,
                p.n_i,
                p.total_qubits()
            ));
        }
        println!("{line}");
    }
    for warning in &summary.warnings {
        println!("warning: {warning}");
    }
    for failure in &summary.failures {
        println!("failed: {failure}");
    }
    println!(
        "wrote {} ({} rows, {} failures) in {:.3} s",
        summary.output_dir.display(),
        summary.rows.len(),
        summary.failures.len(),
        summary.wall_time.as_secs_f64()
    );
}

fn validate(args: ValidateArgs) -> ExitCode {
    let config = match load_config(&args.source) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let diagnostics = validate_config(&config);
    for d in &diagnostics {
        println!("{d}");
    }
    if args.print {
        print!("{}", config.to_toml_string());
    }
    if has_errors(&diagnostics) {
        ExitCode::from(2)
    } else {
        if diagnostics.is_empty() {
            println!("config is valid");
        } else {
            println!("config is valid ({} warnings)", diagnostics.len());
        }
        ExitCode::SUCCESS
    }
}

/// Recomputes every CSV row's rmse from the dumped complex matrices and
/// reports agreement.
fn report(dir: &PathBuf) -> ExitCode {
    let csv = match std::fs::read_to_string(dir.join("results.csv")) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.join("results.csv").display());
            return ExitCode::from(2);
        }
    };
    let truth = match read_complex_matrix(&dir.join("sigma_true.cq64")) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: cannot read sigma_true.cq64: {e}");
            return ExitCode::from(2);
        }
    };
    let mut rows = 0usize;
    let mut mismatches = 0usize;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 3 {
            eprintln!("error: malformed CSV row: {line}");
            return ExitCode::from(2);
        }
        let (rate, method, written) = (cells[0], cells[1], cells[2]);
        let parsed_rate: f64 = match rate.parse() {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: bad rate {rate:?}: {e}");
                return ExitCode::from(2);
            }
        };
        let written_rmse: f64 = match written.parse() {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: bad rmse {written:?}: {e}");
                return ExitCode::from(2);
            }
        };
        let dump = dir.join(format!("sigma_bar_{}_{method}.cq64", rate_tag(parsed_rate)));
        let bar = match read_complex_matrix(&dump) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", dump.display());
                return ExitCode::from(2);
            }
        };
        let recomputed = global_rmse(&bar, &truth);
        let agree = (recomputed - written_rmse).abs() <= 1e-12 * written_rmse.max(1.0);
        rows += 1;
        if agree {
            println!("rate {rate} {method}: rmse {written} verified");
        } else {
            mismatches += 1;
            println!("rate {rate} {method}: MISMATCH csv {written} vs recomputed {recomputed:e}");
        }
    }
    if rows == 0 {
        eprintln!("error: results.csv has no data rows");
        return ExitCode::from(2);
    }
    if mismatches == 0 {
        println!("{rows} rows verified against the dumps");
        ExitCode::SUCCESS
    } else {
        println!("{mismatches} of {rows} rows disagree with the dumps");
        ExitCode::from(1)
    }
}
