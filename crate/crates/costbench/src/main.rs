use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use costbench::commands;
use costbench::document::ResultsDocument;
use costbench::CliError;

/// Cost-aware benchmark for cross-project defect prediction.
///
/// Set COSTBENCH_LOG (error, warn, info, debug) to control log output.
#[derive(Parser)]
#[command(name = "costbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark described by a run manifest and write the results.
    Run { manifest: PathBuf },
    /// Print mean values and rankscores for one metric of one dataset.
    Rank {
        results: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long)]
        dataset: String,
    },
    /// Print the cost-effectiveness curve of one approach on one product as CSV.
    Curves {
        results: PathBuf,
        #[arg(long)]
        approach: String,
        #[arg(long)]
        product: String,
        #[arg(long)]
        dataset: Option<String>,
    },
    /// Compare binary labels with defect counts on the cost metrics.
    CompareModes { results: PathBuf },
    /// Kendall's tau between mean rankscores of two metric sets.
    Correlate {
        results: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        set_a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        set_b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
    },
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run { manifest } => {
            let out = commands::run(&manifest)?;
            Ok(format!("wrote {}\n", out.display()))
        }
        Command::Rank {
            results,
            metric,
            dataset,
        } => commands::rank(&ResultsDocument::read(&results)?, &metric, &dataset),
        Command::Curves {
            results,
            approach,
            product,
            dataset,
        } => commands::curves(
            &ResultsDocument::read(&results)?,
            &approach,
            &product,
            dataset.as_deref(),
        ),
        Command::CompareModes { results } => commands::compare_modes(&ResultsDocument::read(&results)?),
        Command::Correlate {
            results,
            set_a,
            set_b,
            datasets,
        } => commands::correlate(&ResultsDocument::read(&results)?, &set_a, &set_b, datasets.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("COSTBENCH_LOG", "warn")).init();
    match dispatch(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
