use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stampede_lab::commands::{self, parse_seeds};
use stampede_lab::{load_config, LoadedConfig, Result};

#[derive(Parser)]
#[command(name = "stampede", version, about = "Belief-space stampede and evacuation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one swarm simulation; writes timeseries.csv and summary.json.
    SwarmRun(RunArgs),
    /// Run one fleet evacuation; writes events.csv and summary.json.
    RouteRun(RunArgs),
    /// Sweep one numeric swarm parameter over a grid and seeds; writes sweep.csv and summary.json.
    Sweep(SweepArgs),
    /// Paired control/treatment runs; writes compare.csv and summary.json.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Defaults to the first seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    param: String,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    steps: usize,
    /// `N..M`, `N..=M` or `a,b,c`; defaults to the config's seeds.
    #[arg(long, value_parser = seed_list)]
    seeds: Option<Seeds>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Give twice: control first, then treatment.
    #[arg(long, num_args = 1, required = true)]
    config: Vec<PathBuf>,
    /// Defaults to the control config's seeds.
    #[arg(long, value_parser = seed_list)]
    seeds: Option<Seeds>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct Seeds(Vec<u64>);

fn seed_list(s: &str) -> std::result::Result<Seeds, String> {
    parse_seeds(s).map(Seeds)
}

fn out_dir(cfg: &LoadedConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.base_dir.join(&cfg.config.output_dir))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::SwarmRun(a) => {
            let cfg = load_config(&a.config)?;
            let seed = a.seed.unwrap_or(cfg.config.seeds[0]);
            commands::swarm_run(&cfg, seed, &out_dir(&cfg, a.out))
        }
        Command::RouteRun(a) => {
            let cfg = load_config(&a.config)?;
            let seed = a.seed.unwrap_or(cfg.config.seeds[0]);
            commands::route_run(&cfg, seed, &out_dir(&cfg, a.out))
        }
        Command::Sweep(a) => {
            let cfg = load_config(&a.config)?;
            let values = commands::grid(a.from, a.to, a.steps)?;
            let seeds = a.seeds.map_or_else(|| cfg.config.seeds.clone(), |s| s.0);
            commands::sweep(&cfg, &a.param, &values, &seeds, &out_dir(&cfg, a.out))
        }
        Command::Compare(a) => {
            let [control, treatment] = a.config.as_slice() else {
                return Err(stampede_lab::LabError::invalid("--config", "compare takes exactly two configs"));
            };
            let control = load_config(control)?;
            let treatment = load_config(treatment)?;
            let seeds = a.seeds.map_or_else(|| control.config.seeds.clone(), |s| s.0);
            commands::compare(&control, &treatment, &seeds, &out_dir(&control, a.out))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", Path::new(&p).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
