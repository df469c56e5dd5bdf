use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::Context;
use clap::{Parser, Subcommand};

use boats::commands::{self, FitOptions};
use boats::experiment::preset_names;
use boats::model::Method;

/// Sparse linear regression by bootstrapped adaptive threshold selection,
/// with ridge / lasso / elastic-net baselines and a synthetic benchmark
/// harness.
#[derive(Parser)]
#[command(name = "boats", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (dataset.csv, truth.csv, meta.toml).
    Generate {
        /// Generate config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit one model to a dataset CSV (weights.csv, report.toml).
    Fit {
        /// Dataset CSV with named columns.
        data: PathBuf,
        /// ols, ridge, lasso, elastic_net, or boats.
        #[arg(long)]
        method: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Response column name (default: y).
        #[arg(long)]
        response_column: Option<String>,
        /// Share of samples for meta-parameter selection (idle for ols or
        /// with --lambda; the split shape stays the same).
        #[arg(long, default_value_t = 0.1)]
        select_fraction: f64,
        /// Held-out share for test metrics; 0 disables them.
        #[arg(long, default_value_t = 0.1)]
        test_fraction: f64,
        /// Fixed penalty for ridge / lasso / elastic_net, skipping the sweep.
        #[arg(long)]
        lambda: Option<f64>,
        /// Split / permutation seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Response permutations behind the null profile.
        #[arg(long, default_value_t = 100)]
        n_permutations: usize,
        /// Worker threads (default: one per core).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a benchmark grid, resuming compatible rows already in --out.
    Benchmark {
        /// Benchmark config (TOML); start from `boats presets`.
        #[arg(long)]
        config: PathBuf,
        /// Results CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: one per core).
        #[arg(long)]
        workers: Option<usize>,
        /// Record wall-clock time per row (breaks byte-for-byte
        /// reproducibility of the runtime column).
        #[arg(long)]
        timing: bool,
    },
    /// Print a built-in benchmark config, or list the available names.
    Presets {
        /// One of the preset names; omit to list them.
        name: Option<String>,
        /// Write the TOML here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { config, out, seed } => {
            let outcome = commands::cmd_generate(&config, &out, seed)
                .context("generate failed")?;
            println!(
                "wrote {}, {}, {} (m={}, d={}, noise sigma={:.6})",
                outcome.dataset_path.display(),
                outcome.truth_path.display(),
                outcome.meta_path.display(),
                outcome.m,
                outcome.d,
                outcome.noise_sigma,
            );
        }
        Command::Fit {
            data,
            method,
            out,
            response_column,
            select_fraction,
            test_fraction,
            lambda,
            seed,
            n_permutations,
            workers,
        } => {
            let opts = FitOptions {
                method: Method::from_str(&method)?,
                response_column,
                select_fraction,
                test_fraction,
                lambda,
                seed,
                n_permutations,
                workers,
            };
            let outcome = commands::cmd_fit(&data, &out, &opts).context("fit failed")?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "{}: meta parameter {}, support {} of {}, train loss {:.6}",
                outcome.method, outcome.meta_parameter, outcome.support_size, outcome.d,
                outcome.train_loss,
            );
            if let (Some(r2), Some(bic)) = (outcome.test_r2, outcome.test_bic) {
                println!("test R^2 {r2:.4}, test BIC {bic:.2}");
            }
            if !outcome.converged {
                eprintln!("warning: solver hit its sweep budget before converging");
            }
            println!("wrote {} and {}", outcome.weights_path.display(), outcome.report_path.display());
        }
        Command::Benchmark {
            config,
            out,
            seed,
            workers,
            timing,
        } => {
            let outcome = commands::cmd_benchmark(&config, &out, seed, workers, timing)
                .context("benchmark failed")?;
            println!(
                "{} rows: {} computed, {} reused, {} failed -> {}",
                outcome.total,
                outcome.computed,
                outcome.reused,
                outcome.failed_cells,
                out.display(),
            );
        }
        Command::Presets { name, out } => match name {
            None => {
                for name in preset_names() {
                    println!("{name}");
                }
            }
            Some(name) => {
                let text = commands::cmd_presets(&name, out.as_deref())?;
                match out {
                    Some(path) => println!("wrote {}", path.display()),
                    None => print!("{text}"),
                }
            }
        },
    }
    Ok(())
}
