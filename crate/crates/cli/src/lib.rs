//! Command line runner for the WKB dispersion laboratory.
//!
//! `wkb-lab run --config exp.toml` runs one experiment and writes
//! `<out>/<name>.csv` and `<out>/<name>.json`. Exit status: 0 when every
//! criterion passes, 1 when one fails, 2 on usage or configuration errors,
//! 3 when the kernel quadrature would exceed the node budget.

pub mod config;
pub mod experiments;
pub mod report;

use clap::{Parser, Subcommand};
use config::{ExperimentConfig, ExperimentName};
use experiments::{run_experiment, RunSettings};
use report::{emit, Format};
use std::path::PathBuf;
use std::time::Instant;
use wkb_lab::LabError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOLUTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "wkb-lab", version, about = "Semiclassical dispersion and Strichartz experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `experiment.output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `experiment.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Kernel quadrature node budget.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// List the available experiments.
    List,
    /// Parse and range-check a config without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Exit status for a numerical error.
pub fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::ResolutionBudget { .. } => EXIT_RESOLUTION,
        LabError::InvalidParameter(_) | LabError::Inadmissible(_) | LabError::Precondition(_) | LabError::Underdetermined(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Runs the parsed command line; returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::List => {
            for n in ExperimentName::ALL {
                println!("{:<16} {}", n.as_str(), n.summary());
            }
            EXIT_PASS
        }
        Command::ValidateConfig { config } => match ExperimentConfig::load(&config) {
            Ok(c) => {
                println!("{}: ok ({})", config.display(), c.experiment.name);
                EXIT_PASS
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Command::Run { config, out, seed, workers, budget } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            if let Some(w) = workers {
                if w == 0 {
                    eprintln!("error: --workers must be at least 1");
                    return EXIT_USAGE;
                }
                // a second call in the same process keeps the first pool
                let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
            }
            let settings = RunSettings { seed: seed.unwrap_or(cfg.experiment.seed), budget };
            let dir = out.or_else(|| cfg.experiment.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
            let start = Instant::now();
            let (mut report, table) = match run_experiment(&cfg, settings) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            };
            report.wall_time = start.elapsed();
            for format in [Format::Csv, Format::Json] {
                if let Err(e) = emit(&report, &table, &dir, format) {
                    eprintln!("error: cannot write to {}: {e}", dir.display());
                    return EXIT_USAGE;
                }
            }
            print!("{}", report.summary());
            if report.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
    }
}
