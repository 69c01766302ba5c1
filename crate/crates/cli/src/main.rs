//! `hermkr`: batch front end for Hermitian-lattice, Green-function and intersection
//! computations driven by a JSON configuration.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed or invalid configuration (exit code 2).
    Config(String),
    /// Divisor proximity, truncation cap or other numeric failure (exit code 3).
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hermkr", version, about = "Hermitian lattices, Green functions and CM intersection sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the data-parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Finite and archimedean intersection sums for every (m, v) in the config (JSON).
    Intersect,
    /// Boundary behaviour of the Green function along a ray in a cusp chart (CSV).
    GreenProbe,
    /// Self-duality, signature, vector counts, isotropic vectors and normal decomposition (JSON).
    Lattice,
    /// The representation count ρ for ideals of F (JSON).
    Rho,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let output = match cli.command {
        Command::Intersect => commands::intersect(&cfg)?,
        Command::GreenProbe => commands::green_probe(&cfg)?,
        Command::Lattice => commands::lattice(&cfg)?,
        Command::Rho => commands::rho(&cfg)?,
    };
    match &cli.out {
        Some(p) => std::fs::write(p, &output.text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{}", output.text),
    }
    Ok(output.all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hermkr: some requested items failed; see the report");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("hermkr: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => 2,
                CliError::Numeric(_) => 3,
            })
        }
    }
}
