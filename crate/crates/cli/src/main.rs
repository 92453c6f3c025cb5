//! `besov-trace` — experiment driver for the trace-space library.
//!
//! Each subcommand reads a JSON config (`--config`), writes one CSV artifact
//! into `--out`, and prints a short summary. Runs are deterministic: the same
//! config, seed, and flags produce byte-identical CSV files, independent of
//! `--threads` and of whether the library was built with or without the
//! `parallel` feature.
//!
//! Exit codes: 0 on success; 2 when an exponent gate rejects the parameters
//! or the config/usage is invalid; 1 on any other error.

mod config;
mod experiments;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

#[derive(Debug)]
pub enum CliError {
    /// Config file problems: unreadable, malformed, or failing validation.
    Config(String),
    /// Filesystem problems while writing artifacts.
    Io(String),
    /// Errors surfaced by the library.
    Core(besov_trace::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            // Gate rejections and bad configs are usage errors, matching
            // clap's own exit code for bad command lines.
            CliError::Config(_) => ExitCode::from(2),
            CliError::Core(besov_trace::Error::Gate(_)) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "besov-trace",
    version,
    about = "Experiments for Besov-type trace spaces on d-sets",
    propagate_version = true
)]
struct Cli {
    /// Path to the JSON experiment config (required by every subcommand).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory the CSV artifact is written into (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Seed for any randomized sampling. The shipped experiments are fully
    /// deterministic; the flag pins the contract for future ones.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the config's refinement depth(s), where the experiment has
    /// one (trace-roundtrip, lemma31). Ignored elsewhere.
    #[arg(long, global = true, value_name = "M")]
    depth: Option<usize>,

    /// Worker threads for parallel reductions. Affects speed only, never
    /// results: reductions split at fixed midpoints.
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check symbol inequalities and scaling indices; optionally a trace gate.
    SymbolsCheck,
    /// Evaluate the equivalent-norm family on Gaussian mixtures.
    Norms,
    /// Build a Whitney decomposition and report its certificates.
    Whitney,
    /// Tabulate the convolution kernel and its decay envelope.
    Kernel,
    /// Run the extension or restriction pipeline over refinement depths.
    TraceRoundtrip,
    /// Evaluate the pair-sum restriction bound over a radius list.
    Lemma31,
}

fn load_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T, CliError> {
    let path = path.ok_or_else(|| {
        CliError::Config("--config <PATH> is required for this subcommand".into())
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        CliError::Config(format!(
            "{} (at field path '{}' in {})",
            e.inner(),
            e.path(),
            path.display()
        ))
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = cli.config.as_deref();
    let out = cli.out.as_path();
    match cli.command {
        Command::SymbolsCheck => experiments::run_symbols_check(&load_config(config)?, out),
        Command::Norms => experiments::run_norms(&load_config(config)?, out),
        Command::Whitney => experiments::run_whitney(&load_config(config)?, out),
        Command::Kernel => experiments::run_kernel(&load_config(config)?, out),
        Command::TraceRoundtrip => {
            experiments::run_trace_roundtrip(&load_config(config)?, out, cli.depth)
        }
        Command::Lemma31 => experiments::run_lemma31(&load_config(config)?, out, cli.depth),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            // Already-initialized pools only cost the requested thread count;
            // results never depend on it.
            eprintln!("warning: could not pin thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
