use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::debug;

use separator_cli::run::RunOptions;
use separator_cli::{check, CheckOptions, EXIT_ERROR};

/// Environment variable read when `--budget` is absent.
const BUDGET_VAR: &str = "SEP_BUDGET";

#[derive(Parser)]
#[command(name = "sep", version, about = "Separator checks for schemes glued from two affine charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every query of a manifest.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Primes for fiber-length cross-checks of module-finite maps, e.g. 101,103.
    #[arg(long, value_delimiter = ',')]
    oracle: Vec<u32>,
    /// Step limit for Gröbner computations (default from SEP_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
    /// File of `<query> => <status>` lines; a differing status exits with 1.
    #[arg(long)]
    strict_expect: Option<PathBuf>,
    /// Also run the randomized flatness suite with this seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn budget_from_env() -> Result<Option<u64>> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("{BUDGET_VAR}={v} is not a step count"))?)),
        Err(_) => Ok(None),
    }
}

fn run_check(args: CheckArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let expect = match &args.strict_expect {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let budget = match args.budget {
        Some(b) => Some(b),
        None => budget_from_env()?,
    };
    debug!("budget {budget:?}, oracle primes {:?}", args.oracle);
    let opts = CheckOptions { run: RunOptions { oracle: args.oracle, seed: args.seed }, budget, expect };
    let source = args.file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let outcome = check(&source, &text, &opts).map_err(|e| anyhow::anyhow!("{}:{e}", args.file.display()))?;
    match args.format {
        Format::Text => print!("{}", outcome.report.render_text()),
        Format::Json => print!("{}", outcome.report.render_json()),
    }
    for m in &outcome.mismatches {
        match &m.actual {
            Some(a) => eprintln!("expectation failed: {} => {}, got {a}", m.query, m.expected),
            None => eprintln!("expectation failed: {} => {}, no such query", m.query, m.expected),
        }
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check(args) => run_check(args).unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }),
    };
    ExitCode::from(code as u8)
}
