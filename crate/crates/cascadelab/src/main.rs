use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cascadelab::cli::{
    cmd_cascade, cmd_generate, cmd_simulate, cmd_theory, CliError, CommandContext, ExperimentConfig,
};

/// Multi-stage complex contagions: simulation, tree approximation, and
/// cascade boundary analysis.
#[derive(Parser)]
#[command(name = "cascadelab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network and write it as a canonical edge list.
    Generate(RunArgs),
    /// Run the Monte Carlo simulation and write the time series.
    Simulate(RunArgs),
    /// Evaluate the analytical approximation (optionally overlaid with a
    /// simulation run).
    Theory(RunArgs),
    /// Cascade condition, parameter sweeps, and saddle-node continuation.
    Cascade(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker pool size (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory override (falls back to the config, then
    /// $CASCADELAB_OUT, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG charts next to the CSVs.
    #[arg(long)]
    svg: bool,
}

fn build_context(args: &RunArgs) -> Result<CommandContext, CliError> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))?;
    }
    let (config, config_text) = ExperimentConfig::load(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .or_else(|| std::env::var_os("CASCADELAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let svg = args.svg || config.output.svg;
    let seed = args.seed.unwrap_or(config.run.seed);
    Ok(CommandContext {
        config,
        config_text,
        seed,
        out_dir,
        svg,
    })
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate(args) => cmd_generate(&build_context(args)?),
        Command::Simulate(args) => cmd_simulate(&build_context(args)?),
        Command::Theory(args) => cmd_theory(&build_context(args)?),
        Command::Cascade(args) => cmd_cascade(&build_context(args)?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cascadelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
