//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gch::runner;

#[derive(Parser)]
#[command(name = "gch", about = "Generalized Camassa-Holm numerical laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured initial-value problem (or sweep).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [output].dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the peakon coefficient equation and certify the weak form.
    PeakonVerify {
        #[arg(long, allow_negative_numbers = true)]
        k1: f64,
        #[arg(long, allow_negative_numbers = true)]
        k2: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// PASS threshold, relative to scale(phi).
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Besov norm of a stored field (CSV with header x,u).
    Besov {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        /// Integrability exponent; "inf" allowed.
        #[arg(long, default_value = "2")]
        p: String,
        /// Summation exponent; "inf" allowed.
        #[arg(long, default_value = "2")]
        r: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Friedrichs frozen-coefficient iteration contraction table.
    Friedrichs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 6)]
        iters: usize,
    },
    /// Sweep initial amplitudes and report monitor threshold crossings.
    BlowupScan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_exponent(text: &str) -> Result<f64, String> {
    match text {
        "inf" | "Inf" | "INF" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|e| format!("bad exponent \"{other}\": {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let outcome: gch::Result<i32> = match cli.command {
        Command::Simulate { config, out } => {
            runner::cmd_simulate(&config, out.as_deref(), quiet).map(|(_, code)| code)
        }
        Command::PeakonVerify { k1, k2, c, tolerance, out } => {
            runner::cmd_peakon_verify(k1, k2, c, tolerance, out.as_deref(), quiet)
                .map(|(_, code)| code)
        }
        Command::Besov { input, s, p, r, out } => {
            let parsed = parse_exponent(&p).and_then(|p| Ok((p, parse_exponent(&r)?)));
            match parsed {
                Ok((p, r)) => {
                    runner::cmd_besov(&input, s, p, r, out.as_deref(), quiet).map(|_| 0)
                }
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(runner::EXIT_FAILED as u8);
                }
            }
        }
        Command::Friedrichs { config, iters } => {
            runner::cmd_friedrichs(&config, iters, quiet).map(|(_, code)| code)
        }
        Command::BlowupScan { config, out } => {
            runner::cmd_blowup_scan(&config, out.as_deref(), quiet).map(|(_, code)| code)
        }
    };

    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(runner::EXIT_FAILED as u8)
        }
    }
}
