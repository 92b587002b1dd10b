//! Scenario runner and verification suite for the nm-thermo library.
//!
//! Subcommands:
//! - `run <model>`: simulate one scenario (depolarize, thermal-qubit,
//!   spinbath), write a CSV with every column named in the header and a JSON
//!   sidecar echoing the configuration and the identity-check residuals.
//! - `verify`: run the numerical verification suite (oracle equivalence,
//!   identity residuals, Pinsker sweep, rate reconstruction; `--level full`
//!   adds larger baths and the random-ensemble theorem checks) and write a
//!   JSON report.
//!
//! Exit codes: 0 on success, 1 on model/check failure, 2 on usage errors.
//! `NM_THERMO_THREADS` caps sweep parallelism.

mod config;
mod csvio;
mod scenarios;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "nm-thermo",
    version,
    about = "Time-local quantum master equations: rates, entropy production, free-energy flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a scenario and write CSV + JSON sidecar
    Run(config::RunArgs),
    /// Run the verification suite and write a JSON report
    Verify(verify::VerifyArgs),
}

fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("NM_THERMO_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // ignore failure if a pool already exists (tests)
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: NM_THERMO_THREADS={v} is not a positive integer; ignored"),
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => scenarios::run(args),
        Command::Verify(args) => verify::run(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                scenarios::CliError::Usage(_) => ExitCode::from(2),
                scenarios::CliError::Model(_) | scenarios::CliError::Io(_) => ExitCode::from(1),
            }
        }
    }
}
