use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edamcc_harness::pipeline::{characterize, compare, failures, run_experiment, sweep};
use edamcc_harness::{load_config, ExperimentConfig, Format, HarnessError};

/// Runs and reports Gaussian EDA experiments.
#[derive(Parser)]
#[command(name = "edamcc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory, overriding the config's `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root seed, overriding the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of runs executed in parallel.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every run of a config and write traces, timing and a summary.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a grid over theta and c at the first population size.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        theta: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        c: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// U-test report of the runs in <DIR_B> against those in <DIR_A>.
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write the strong-set Q-matrix and mean |S| per generation.
    Characterize {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn configure(path: &PathBuf, common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut config = load_config(path)?;
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn main_inner(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, common } => {
            let config = configure(&config, &common)?;
            let (records, report) = run_experiment(&config, common.jobs, common.format)?;
            print!("{}", report.to_text());
            println!("results in {}", config.out.display());
            let failed = failures(&records);
            if failed > 0 {
                return Err(HarnessError::RunsFailed {
                    failed,
                    total: records.len(),
                });
            }
        }
        Command::Sweep {
            config,
            theta,
            c,
            common,
        } => {
            let config = configure(&config, &common)?;
            let cells = sweep(&config, &theta, &c, common.jobs, common.format)?;
            for k in &cells {
                println!(
                    "theta={:<5} c={:<4} {}",
                    k.theta,
                    k.c,
                    edamcc_harness::report::format_cell(k.mean, k.std_dev)
                );
            }
            let failed: usize = cells.iter().map(|k| k.failed).sum();
            if failed > 0 {
                let total = cells.iter().map(|k| k.failed + k.completed).sum();
                return Err(HarnessError::RunsFailed { failed, total });
            }
        }
        Command::Compare { dir_a, dir_b, common } => {
            let report = compare(&dir_a, &dir_b, common.out.as_ref(), common.format)?;
            print!("{}", report.to_text());
            for k in &report.comparisons {
                println!(
                    "{} (M={}) vs {} (M={}): U={} p={:.3e} {}",
                    k.label, k.pop_size, k.baseline, k.baseline_pop_size, k.u_statistic, k.p_value, k.marker
                );
            }
        }
        Command::Characterize { config, common } => {
            let config = configure(&config, &common)?;
            for (m, trace) in characterize(&config, common.jobs, common.format)? {
                println!(
                    "M={m}: {} variables x {} generations written to {}",
                    trace.n,
                    trace.generations(),
                    config.out.display()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
