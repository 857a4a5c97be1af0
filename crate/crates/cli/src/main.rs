//! `fskjcr <experiment> --config <path> [--seed N] [--out DIR] [--paper-scale]`
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime or IO error.

use clap::Parser;
use fskjcr::experiments::{run_and_write, Experiment, ExperimentConfig};
use fskjcr::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fskjcr", version, about = "Dynamic-length FSK joint communications/radar experiments")]
struct Args {
    /// af-vs-l, flatness-stats, hitcdf, af-pmf, mse-vs-snr, cdf-at-snr or gamma2-solve
    experiment: String,
    /// Flat TOML file; missing keys take their defaults.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiply run and realisation counts by 10.
    #[arg(long)]
    paper_scale: bool,
}

fn run(args: Args) -> Result<Vec<PathBuf>, Error> {
    let experiment: Experiment = args.experiment.parse()?;
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    cfg.paper_scale |= args.paper_scale;
    run_and_write(experiment, &cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("fskjcr: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("fskjcr: {e}");
            ExitCode::from(3)
        }
    }
}
