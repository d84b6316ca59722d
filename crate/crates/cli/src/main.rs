//! `waveheat`: spectra, resolvent scans, energy-decay simulations and single
//! resolvent solves for the coupled wave-heat system, with CSV/JSON outputs
//! and a digest manifest per run.
//!
//! Exit status: 0 success, 2 non-convergence, 3 failed certificate or
//! self-check, 64 invalid usage or config, 65 insufficient data, 66 missing
//! input, 74 output failure.

mod config;
mod error;
mod output;
mod resolve;
mod scan;
mod simulate;
mod spectrum;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::CliError;
use crate::output::Timings;

#[derive(Debug, Parser)]
#[command(name = "waveheat", version, about = "Spectral and energy-decay experiments for the coupled wave-heat system")]
struct Cli {
    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certified eigenvalues lambda_k^+- and their asymptotics.
    Spectrum(spectrum::SpectrumArgs),
    /// Resolvent norms along the imaginary axis and their growth exponent.
    Scan(scan::ScanArgs),
    /// Energy traces of random classical data or a single eigenmode.
    Simulate(simulate::SimulateArgs),
    /// One resolvent solve with diagnostics, or the manufactured self-test.
    Resolve(resolve::ResolveArgs),
}

fn execute<C: Serialize>(
    out: &Path,
    name: &str,
    config: Result<C, CliError>,
    run: impl FnOnce(&C, &mut Timings) -> Result<output::RunOutput, CliError>,
) -> Result<(), CliError> {
    let config = config?;
    let mut timings = Timings::start();
    let result = run(&config, &mut timings)?;
    for path in output::finish(out, name, &config, timings, result)? {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {j} workers: {e}")))?;
    }
    let out = &cli.out;
    match cli.command {
        Command::Spectrum(a) => execute(out, "spectrum", a.resolve(), spectrum::run),
        Command::Scan(a) => execute(out, "scan", a.resolve(), scan::run),
        Command::Simulate(a) => execute(out, "simulate", a.resolve(), simulate::run),
        Command::Resolve(a) => execute(out, "resolve", a.resolve(), resolve::run),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
