#![allow(clippy::result_large_err)]
mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Exit, Options};

#[derive(Parser)]
#[command(
    name = "siflow",
    version,
    about = "Superintegrable geodesic flow workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Number of random cases for `appendix` and `novichkov`.
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Largest `n` checked by exact bracket expansion; larger models go numeric.
    #[arg(long, global = true, default_value_t = 3)]
    symbolic_max_n: usize,
    /// Also write the report as JSON.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Trajectory CSV path for `integrate` (default `trajectory.csv`).
    #[arg(long, global = true)]
    csv: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print x, x', b_k and c_k for the model.
    Build { config: String },
    /// Check the profile equation, recurrences and the five bracket relations.
    Verify { config: String },
    /// Integrate the geodesic flow and report invariant drift.
    Integrate { config: String },
    /// Classify a global example as H2, R2 or rejected.
    Classify { config: String },
    /// Run the randomized identity suites.
    Appendix {
        /// A, B or C; all three when omitted.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Check the Novichkov-type relations for a parametric solution.
    Novichkov { config: Option<String> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        seed: cli.seed,
        cases: cli.cases,
        symbolic_max_n: cli.symbolic_max_n,
        csv: cli.csv,
    };
    let outcome = match &cli.command {
        Command::Build { config } => commands::build(config, &opts),
        Command::Verify { config } => commands::verify(config, &opts),
        Command::Integrate { config } => commands::run_integrate(config, &opts),
        Command::Classify { config } => commands::classify(config, &opts),
        Command::Appendix { suite } => commands::appendix(suite.as_deref(), &opts),
        Command::Novichkov { config } => commands::novichkov(config.as_deref(), &opts),
    };
    let exit = match outcome {
        Ok((report, exit)) => {
            print!("{}", report.render());
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(Exit::Parse as u8);
                }
            }
            exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    };
    ExitCode::from(exit as u8)
}
