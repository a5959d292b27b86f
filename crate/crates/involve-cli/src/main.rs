//! `involve` — command-line toolkit for quantifying human involvement in
//! generated academic text: score prompt/generation pairs, build labeled
//! datasets, train and evaluate the dual-head detector, and analyze
//! documents into highlighted HTML reports.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Settings;

/// Exit-code contract: 0 ok, 2 usage or validation, 3 model or embedder
/// failure, 4 I/O failure while writing results.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Model(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "involve",
    version,
    about = "Quantify human involvement in generated academic text"
)]
struct Cli {
    /// TOML settings file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for sampling, mock generation, and model initialization.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a prompt/generation pair: raw and normalized overlap.
    Score(commands::score::ScoreArgs),
    /// Build a labeled dataset from an abstract corpus.
    Generate(commands::generate::GenerateArgs),
    /// Train the dual-head detector on a labeled dataset.
    Train(commands::train::TrainArgs),
    /// Evaluate a trained checkpoint on a labeled dataset.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Analyze a document with a trained checkpoint into an HTML report.
    Analyze(commands::analyze::AnalyzeArgs),
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let settings = match Settings::resolve(cli.config.as_deref(), cli.seed, cli.json) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.code());
        }
    };
    let result = match cli.command {
        Command::Score(args) => commands::score::run(&args, &settings),
        Command::Generate(args) => commands::generate::run(&args, &settings),
        Command::Train(args) => commands::train::run(&args, &settings),
        Command::Evaluate(args) => commands::evaluate::run(&args, &settings),
        Command::Analyze(args) => commands::analyze::run(&args, &settings),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
