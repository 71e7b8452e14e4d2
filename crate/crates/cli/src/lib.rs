//! `starkcap`: absorbing-potential sweeps, distortion cross-checks and
//! resolvent probes driven by a TOML run file.

pub mod config;
pub mod output;
pub mod svg;
pub mod verify;

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use commands::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "starkcap",
    version,
    about = "Resonances of Stark Hamiltonians by absorbing potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the absorbing operator at one ε
    Spectrum(RunArgs),
    /// ε-sweep, trajectories and resonance estimates, with an optional
    /// distortion cross-check
    Sweep(RunArgs),
    /// Smallest singular values of the distorted absorbing operator on a lattice
    Probe(RunArgs),
    /// Canned property suites
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

/// Exit codes: 0 ok, 1 a verify check failed, 2 bad configuration,
/// 3 solver or IO failure.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("starkcap: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
