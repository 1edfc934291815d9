//! `ietlab`: runs exact IET experiments described by JSON scenes.

mod commands;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Decompose,
    Growth,
    Birkhoff,
    Lamplighter,
    Hj,
    Distinguish,
    Obstruction,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "ietlab", version, about = "Exact experiments on groups of interval exchange transformations")]
pub struct Config {
    #[arg(value_enum)]
    pub command: Command,
    /// Scene file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Cap on orbits, balls and enumerations.
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
    /// Radius or word length, depending on the command.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Iteration count or sample size, depending on the command.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for sampled points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Refinement budget for symbol comparisons.
    #[arg(long = "budget-refine")]
    pub budget_refine: Option<usize>,
}

fn main() -> ExitCode {
    let config = Config::parse();
    let outcome = match commands::run(&config) {
        Ok(outcome) => outcome,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let text = match outcome.render(config.format) {
        Ok(text) => text,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    if let Some(note) = outcome.note() {
        eprintln!("{note}");
    }
    ExitCode::from(outcome.exit_code())
}
