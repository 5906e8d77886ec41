use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use effsel::Error;

mod commands;
mod report;

use report::Format;

/// Effect-size feature selection for two-class tabular data.
#[derive(Parser, Debug)]
#[command(name = "effsel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Effect sizes with confidence intervals, one row per feature.
    Analyze(Opts),
    /// Decision-rule selections per measure, plus common features and Relief.
    Select(Opts),
    /// Cross-validated linear SVM on each selected subset.
    Evaluate(Opts),
    /// Time effect-size scoring against Relief on synthetic data.
    Bench(Opts),
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Data file: UCI wdbc.data layout, or a headed CSV with --label-column.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Label column of a headed CSV input.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Value of the label column marking the positive class.
    #[arg(long, default_value = "M")]
    pub positive: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Outer bootstrap resamples.
    #[arg(long, default_value_t = 2000)]
    pub b1: usize,
    /// Nested bootstrap resamples per outer resample.
    #[arg(long, default_value_t = 200)]
    pub b2: usize,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,
    /// SVM regularization.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Comma-separated subset of d,D,u1,u2,u3,common,relief.
    #[arg(long, value_delimiter = ',')]
    pub measure: Option<Vec<String>>,
}

/// Exit codes: 0 success, 1 computation error, 2 usage or I/O error.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parse { .. } | Error::InvalidDataset(_) | Error::InvalidArgument(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, opts) = match &cli.command {
        Command::Analyze(o) => ("analyze", o),
        Command::Select(o) => ("select", o),
        Command::Evaluate(o) => ("evaluate", o),
        Command::Bench(o) => ("bench", o),
    };
    commands::validate(opts)?;
    let report = match &cli.command {
        Command::Analyze(o) => commands::analyze(o)?,
        Command::Select(o) => commands::select(o)?,
        Command::Evaluate(o) => commands::evaluate(o)?,
        Command::Bench(o) => commands::bench(o)?,
    };
    let io_err = |e: io::Error| Failure::Usage(format!("{name}: cannot write report: {e}"));
    match &opts.out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            report.write(&mut w, opts.format).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.write(&mut w, opts.format).map_err(io_err)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors by itself.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
