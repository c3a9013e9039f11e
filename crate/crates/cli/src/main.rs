//! `lexicast`: score dated document corpora against emotion lexicons and
//! backtest the scored series as an ex-ante predictor of index revisions.

mod commands;
mod config;
mod stage;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "lexicast", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus: manifest, encodings, month coverage.
    Ingest(config::CommonArgs),
    /// Score a corpus into monthly sentiment series CSVs.
    Score(config::CommonArgs),
    /// Run expanding-window backtests against an index table.
    Backtest(config::CommonArgs),
    /// Fit one series on a lagged other and print the regression report.
    Report(commands::ReportArgs),
    /// Generate a synthetic corpus and index table with a planted signal.
    Synth(synth::SynthArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest(&args),
        Command::Score(args) => commands::score(&args),
        Command::Backtest(args) => commands::backtest(&args),
        Command::Report(args) => commands::report(&args),
        Command::Synth(args) => synth::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
