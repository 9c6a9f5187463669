use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavefd::cli::{run, Experiment, RunConfig, Status, CONFIG_KEYS_HELP};

/// Three-point finite-difference experiments for the 1D acoustic wave equation.
#[derive(Parser)]
#[command(name = "wavefd", version, after_long_help = CONFIG_KEYS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write solution snapshots
    Solve(Opts),
    /// Convergence-error refinement study with fitted order
    Converge(Opts),
    /// Truncation-error refinement study with fitted order
    Consist(Opts),
    /// Discrete energy trace, increment identity, lower bound, random trials
    Energy(Opts),
    /// Energy growth bound on the run and on random trials
    Stability(Opts),
    /// Run outside the CFL condition and report instability
    CflDemo(Opts),
    /// Support-cone check for the solution and both error fields
    ConeCheck(Opts),
}

#[derive(Args)]
#[command(after_long_help = CONFIG_KEYS_HELP)]
struct Opts {
    /// Run config file (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination, overrides `output_path`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Refinement levels, overrides `levels`
    #[arg(long)]
    levels: Option<u32>,
    /// Seed for randomized trials, overrides `seed`
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, opts) = match cli.command {
        Command::Solve(o) => (Experiment::Solve, o),
        Command::Converge(o) => (Experiment::Converge, o),
        Command::Consist(o) => (Experiment::Consist, o),
        Command::Energy(o) => (Experiment::Energy, o),
        Command::Stability(o) => (Experiment::Stability, o),
        Command::CflDemo(o) => (Experiment::CflDemo, o),
        Command::ConeCheck(o) => (Experiment::ConeCheck, o),
    };
    let mut cfg = match &opts.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(Status::Io, &format!("cannot read {}: {e}", path.display())),
            };
            match RunConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => return fail(Status::Config, &format!("{}: {e}", path.display())),
            }
        }
    };
    cfg.experiment = Some(experiment);
    if let Some(out) = opts.out {
        cfg.output_path = Some(out);
    }
    if let Some(levels) = opts.levels {
        cfg.levels = levels;
    }
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let outcome = run(&cfg);
    if let Some(path) = &outcome.output_path {
        println!("wrote {}", path.display());
    }
    match outcome.status {
        Status::Ok => println!("{}", outcome.summary),
        Status::Instability => eprintln!("{}", outcome.summary),
        _ => eprintln!("error: {}", outcome.summary),
    }
    ExitCode::from(outcome.status.code() as u8)
}

fn fail(status: Status, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(status.code() as u8)
}
