use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hexsle::harness::{run_to_dir, Config, Experiment};
use hexsle::Error;

#[derive(Parser)]
#[command(name = "hexsle", version, about = "Percolation exploration, Cardy's formula and SLE(6) experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crossing probability of a quadrilateral
    Crossing(Flags),
    /// Exploration hitting distribution against the hitting law
    Hitting(Flags),
    /// Semi-ball stopping times and driving increments of SLE(6)
    Sle(Flags),
    /// Six-arm and boundary three-arm scaling
    Arms(Flags),
    /// Percolation hits against SLE(6) hits
    Compare(Flags),
    /// Recompute the reference table and report drift
    Goldens(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML or JSON configuration; built-in defaults when absent
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 3 when a statistical check fails
    #[arg(long)]
    check: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::ConfigInvalid(_)
            | Error::InvalidInput(_)
            | Error::InvalidDomain(_)
            | Error::InvalidMarks(_)
            | Error::MeshTooCoarse(_)
            | Error::DegenerateMarks
            | Error::EmptySamples
            | Error::ResolutionTooCoarse(_)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, flags) = match cli.command {
        Command::Crossing(f) => (Experiment::Crossing, f),
        Command::Hitting(f) => (Experiment::Hitting, f),
        Command::Sle(f) => (Experiment::Sle, f),
        Command::Arms(f) => (Experiment::Arms, f),
        Command::Compare(f) => (Experiment::Compare, f),
        Command::Goldens(f) => (Experiment::Goldens, f),
    };
    let cfg = match &flags.config {
        Some(path) => Config::load(path),
        None => Ok(Config::defaults()),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let seed = flags.seed.or(cfg.seed).unwrap_or(0);
    let workers = flags.workers.or(cfg.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        eprintln!("error: --workers must be positive");
        return ExitCode::from(2);
    }
    match run_to_dir(experiment, &cfg, seed, workers, flags.check, &flags.out) {
        Ok((out, manifest)) => {
            for c in &out.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("wrote {} to {}", manifest.outputs.join(", "), flags.out.display());
            if flags.check && !out.passed() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_validation(&e) { 2 } else { 1 })
        }
    }
}
