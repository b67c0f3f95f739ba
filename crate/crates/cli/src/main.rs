//! Batch front-end for the tritronquée solver.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::SweepParam;

#[derive(Parser)]
#[command(name = "tritronquee", version, about = "Painlevé-I tritronquée solutions on complex lines")]
struct Cli {
    /// Suppress the summary line.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration.
    Solve {
        config: PathBuf,
        /// Output directory; overrides TRITRONQUEE_OUT and the config file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve once per value of one parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(error::EXIT_CONFIG as u8),
            };
        }
    };
    let code = match &cli.command {
        Command::Solve { config, out } => run::solve(config, out.as_deref(), cli.quiet),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => run::sweep(config, *param, values, out.as_deref(), cli.quiet),
    };
    ExitCode::from(code as u8)
}
