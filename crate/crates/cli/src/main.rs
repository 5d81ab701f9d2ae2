//! `gicb`: capacity bounds for Gaussian interference networks from the
//! command line.
//!
//! Exit codes: 0 success, 1 property failure, 2 input error, 3 domain error.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ChannelArgs, CliError, CliResult, Format, SweepMode, ORDERING_TOL};

#[derive(Debug, Parser)]
#[command(name = "gicb", version, about = "Inner and outer capacity bounds for Gaussian interference networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the artifact here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Tolerance override (must be positive)
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// JSON report of every two-user bound and the sum-capacity certificate
    Bounds {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Boundary samples of the inner and outer regions
    Region {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// INR thresholds over an SNR range
    ThresholdSweep {
        /// start:stop:step in dB
        #[arg(long, default_value = "0:60:5")]
        snr_db_range: String,
        #[arg(long, value_enum, default_value = "three-user-sym")]
        mode: SweepMode,
    },
    /// Vector-genie bounds and sum-capacity certificates for M users
    NetworkBounds {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Self-checks of the entropy engine
    Verify {
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Swap in a broken formula (extremal, markov, epi, chain-rule)
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("GICB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Input(format!("GICB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot size the thread pool: {e}")))
}

fn json_only(format: Option<Format>, command: &str) -> CliResult<()> {
    if format == Some(Format::Csv) {
        return Err(CliError::Input(format!("`{command}` writes JSON only")));
    }
    Ok(())
}

/// Returns the artifact and an optional failure raised after producing it.
fn run(cli: &Cli) -> CliResult<(String, Option<CliError>)> {
    configure_threads()?;
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {t}")));
        }
    }
    let tol = cli.tol.unwrap_or(ORDERING_TOL);
    match &cli.command {
        Command::Bounds { channel } => {
            json_only(cli.format, "bounds")?;
            Ok((commands::cmd_bounds(&channel.load()?, tol)?, None))
        }
        Command::Region { channel } => {
            commands::cmd_region(&channel.load()?, cli.format.unwrap_or(Format::Csv), tol)
        }
        Command::ThresholdSweep { snr_db_range, mode } => Ok((
            commands::cmd_threshold_sweep(snr_db_range, *mode, cli.format.unwrap_or(Format::Csv))?,
            None,
        )),
        Command::NetworkBounds { channel } => {
            json_only(cli.format, "network-bounds")?;
            Ok((commands::cmd_network_bounds(&channel.load()?)?, None))
        }
        Command::Verify { seed, inject_fault } => {
            json_only(cli.format, "verify")?;
            commands::cmd_verify(*seed, cli.tol, inject_fault.as_deref())
        }
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, failure)| {
        emit(&cli, &text)?;
        failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gicb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
