use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use repo_options::commands::{self, CommandError, ReproduceOptions, RunOptions, EXIT_IO, EXIT_TOLERANCE};
use repo_options::report::{OutputFormat, ReportDocument};
use repo_options::scenario::McConfig;
use repo_options::{DayCount, LiquidityMode};

#[derive(Parser)]
#[command(name = "repo-options", version, about = "Price the options embedded in repo agreements")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Monte Carlo seed; overrides the scenario file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price a general repo: haircut, lender and repo rates, BS comparison.
    PriceGeneral { file: PathBuf },
    /// Price a special repo, either the lender-fail quote or the dealer relations.
    PriceSpecial { file: PathBuf },
    /// Replay the dealer's financing chain.
    DealerSim {
        file: PathBuf,
        /// Allow closing on the realized price instead of the repurchased notes.
        #[arg(long)]
        no_strict: bool,
    },
    /// Recompute both worked examples and compare with the published figures.
    ReproduceExamples {
        /// Also check the closed forms against Monte Carlo.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 360, value_parser = parse_day_count)]
        day_count: u32,
        #[arg(long, default_value_t = 10_000_000)]
        mc_samples: u64,
    },
    /// Compare the option-implied haircut with Black-Scholes across strikes.
    CompareBs {
        file: PathBuf,
        /// Comma-separated repurchase prices; defaults to the scenario's strike.
        #[arg(long)]
        strikes: Option<String>,
    },
}

fn parse_day_count(s: &str) -> Result<u32, String> {
    match s {
        "360" => Ok(360),
        "365" => Ok(365),
        _ => Err(format!("day count must be 360 or 365, got {s}")),
    }
}

const DEFAULT_SEED: u64 = 42;

fn run(cli: &Cli) -> Result<ReportDocument, CommandError> {
    let opts = RunOptions { seed: cli.seed };
    match &cli.command {
        Command::PriceGeneral { file } => commands::price_general(file, opts),
        Command::PriceSpecial { file } => commands::price_special(file, opts),
        Command::DealerSim { file, no_strict } => {
            let mode = if *no_strict { LiquidityMode::Relaxed } else { LiquidityMode::Strict };
            commands::dealer_sim(file, mode)
        }
        Command::ReproduceExamples { mc, day_count, mc_samples } => {
            let day_count = if *day_count == 365 { DayCount::Act365 } else { DayCount::Act360 };
            let mc = mc.then(|| McConfig {
                n: *mc_samples,
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
            });
            commands::reproduce_examples(ReproduceOptions { day_count, mc })
        }
        Command::CompareBs { file, strikes } => {
            let strikes = strikes.as_deref().map(commands::parse_strikes).transpose()?;
            commands::compare_bs(file, strikes.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let doc = match run(&cli) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = doc.render(cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_IO as u8);
            }
        }
        None => print!("{text}"),
    }
    if doc.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &doc.failures {
            eprintln!("failed: {f}");
        }
        ExitCode::from(EXIT_TOLERANCE as u8)
    }
}
