use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};

mod commands;

/// Exit status: 0 success, 1 validation or parse failure, 2 usage error.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "oncodp", version, about = "Optimal multi-modality treatment policies by backward induction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Input {
    /// Scenario document (JSON).
    pub input: Option<PathBuf>,
    /// Built-in preset instead of a file.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a scenario and print per-period action counts.
    Solve {
        #[command(flatten)]
        input: Input,
        /// Write the solution document here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check every value against the recursive expectimax oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Monte-Carlo estimate of the optimal policy's value from a start state.
    Simulate {
        #[command(flatten)]
        input: Input,
        /// Start state as h,phi,tau.
        #[arg(long, value_parser = commands::parse_start)]
        start: (u8, usize, usize),
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write every sampled trajectory as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Compare the policies of two scenarios.
    Compare {
        /// Scenario documents.
        inputs: Vec<PathBuf>,
        /// Built-in presets (repeatable).
        #[arg(long = "preset")]
        presets: Vec<String>,
    },
    /// Print the policy grid for one period and history value.
    Grid {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        h: u8,
        /// Write the grid as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in presets.
    Presets,
    /// Print a preset's scenario document.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, matches: &ArgMatches) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { input, out, verify } => commands::solve(&input, out.as_deref(), verify),
        Command::Simulate {
            input,
            start,
            n,
            seed,
            dump,
        } => commands::simulate(&input, start, n, seed, dump.as_deref()),
        Command::Compare { inputs, presets } => {
            let sub = matches.subcommand_matches("compare").expect("compare subcommand");
            commands::compare(&commands::ordered_inputs(sub, inputs, presets)?)
        }
        Command::Grid { input, t, h, out } => commands::grid(&input, t, h, out.as_deref()),
        Command::Presets => {
            commands::list_presets();
            Ok(())
        }
        Command::Preset { name, out } => commands::print_preset(&name, out.as_deref()),
    }
}
