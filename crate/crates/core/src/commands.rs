//! The operations behind the `boats` binary, as plain functions so they are
//! testable without a process boundary. Each returns a summary struct; user
//! warnings come back in the summary instead of being printed here.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boats::{boats_fit, estimate_null};
use crate::error::{Error, Result};
use crate::evaluation::{bic, make_split, r_squared, sweep_select, BootstrapConfig};
use crate::experiment::{self, BenchmarkOutcome};
use crate::model::{least_squares_loss, ols_fit, Method};
use crate::regularizers::{elastic_net_fit, lasso_fit, ridge_fit, RegularizerSpec};
use crate::seed::derive;
use crate::synthgen::{draw_weights, make_dataset, DistributionParams, ModelSpec, WeightDistribution};
use crate::tabular::{
    read_dataset_csv, write_dataset_csv, write_meta_toml, write_weights_csv, GenerateMeta,
};

const FIT_NULL_STREAM: u64 = 11;

/// Config file for `generate`: one synthetic model. Exactly one of
/// `sample_ratio` (`m = round(ratio * d)`) or `samples` sets the sample
/// count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub distribution: WeightDistribution,
    pub k: usize,
    pub sparsity: f64,
    pub noise_factor: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sample_ratio: Option<f64>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub distribution_params: DistributionParams,
}

pub fn load_generate_config(path: &Path) -> Result<GenerateConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOutcome {
    pub dataset_path: PathBuf,
    pub truth_path: PathBuf,
    pub meta_path: PathBuf,
    pub m: usize,
    pub d: usize,
    pub noise_sigma: f64,
}

/// Draws a model and dataset from a generate config and writes
/// `dataset.csv`, `truth.csv`, and `meta.toml` into `out_dir`. The same
/// config and seed always produce byte-identical files.
pub fn cmd_generate(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<GenerateOutcome> {
    let mut cfg = load_generate_config(config_path)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }

    let spec = ModelSpec {
        distribution: cfg.distribution,
        k: cfg.k,
        sparsity: cfg.sparsity,
        noise_factor: cfg.noise_factor,
        seed: cfg.seed,
        params: cfg.distribution_params,
    };
    let d = spec.dimension()?;
    let m = match (cfg.sample_ratio, cfg.samples) {
        (Some(ratio), None) => {
            if !ratio.is_finite() || ratio <= 0.0 {
                return Err(Error::invalid("sample_ratio", format!("must be positive, got {ratio}")));
            }
            (ratio * d as f64).round() as usize
        }
        (None, Some(samples)) => samples,
        (None, None) => {
            return Err(Error::invalid("generate config", "set sample_ratio or samples"))
        }
        (Some(_), Some(_)) => {
            return Err(Error::invalid(
                "generate config",
                "sample_ratio and samples are mutually exclusive",
            ))
        }
    };

    let truth = draw_weights(&spec)?;
    let data = make_dataset(&truth, m, cfg.seed)?;

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let dataset_path = out_dir.join("dataset.csv");
    let truth_path = out_dir.join("truth.csv");
    let meta_path = out_dir.join("meta.toml");
    write_dataset_csv(&dataset_path, &data)?;
    write_weights_csv(&truth_path, &truth.weights)?;
    write_meta_toml(
        &meta_path,
        &GenerateMeta {
            schema_version: experiment::SCHEMA_VERSION,
            distribution: cfg.distribution,
            k: cfg.k,
            sparsity: cfg.sparsity,
            noise_factor: cfg.noise_factor,
            master_seed: cfg.seed.to_string(),
            d,
            m,
            noise_sigma: truth.noise_sigma,
            distribution_params: cfg.distribution_params,
        },
    )?;
    Ok(GenerateOutcome {
        dataset_path,
        truth_path,
        meta_path,
        m,
        d,
        noise_sigma: truth.noise_sigma,
    })
}

/// Options for `fit`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub method: Method,
    /// Response column name; `y` when absent.
    pub response_column: Option<String>,
    /// Share of samples used to pick the meta-parameter (ignored for plain
    /// least squares or an explicit `lambda`).
    pub select_fraction: f64,
    /// Held-out share for test metrics; 0 skips them.
    pub test_fraction: f64,
    /// Fit the penalized baselines at exactly this penalty, skipping the
    /// sweep.
    pub lambda: Option<f64>,
    pub seed: u64,
    pub n_permutations: usize,
    pub workers: Option<usize>,
}

impl FitOptions {
    pub fn new(method: Method) -> Self {
        FitOptions {
            method,
            response_column: None,
            select_fraction: 0.1,
            test_fraction: 0.1,
            lambda: None,
            seed: 0,
            n_permutations: 100,
            workers: None,
        }
    }
}

/// Summary of one `fit` run; the files named here are written under the out
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub weights_path: PathBuf,
    pub report_path: PathBuf,
    pub method: Method,
    pub meta_parameter: f64,
    pub support_size: usize,
    pub train_loss: f64,
    pub test_r2: Option<f64>,
    pub test_bic: Option<f64>,
    pub converged: bool,
    pub rank_deficient: bool,
    pub m: usize,
    pub d: usize,
    pub warnings: Vec<String>,
}

/// Report sidecar written by `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitReport {
    pub schema_version: u32,
    pub method: Method,
    pub meta_parameter: f64,
    pub train_loss: f64,
    pub support_size: usize,
    pub converged: bool,
    pub rank_deficient: bool,
    pub m: usize,
    pub d: usize,
    pub seed: String,
    pub response_column: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_bic: Option<f64>,
}

/// Fits one model to a dataset on disk and writes `weights.csv` plus
/// `report.toml` into `out_dir`.
pub fn cmd_fit(data_path: &Path, out_dir: &Path, opts: &FitOptions) -> Result<FitOutcome> {
    for (name, f) in [
        ("select_fraction", opts.select_fraction),
        ("test_fraction", opts.test_fraction),
    ] {
        if !f.is_finite() || !(0.0..1.0).contains(&f) {
            return Err(Error::invalid(name, format!("must lie in [0, 1), got {f}")));
        }
    }
    if let Some(lambda) = opts.lambda {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !matches!(opts.method, Method::Ridge | Method::Lasso | Method::ElasticNet) {
            return Err(Error::invalid(
                "lambda",
                format!("an explicit penalty only applies to ridge, lasso, or elastic_net, not {}", opts.method),
            ));
        }
    }

    let file = read_dataset_csv(data_path, opts.response_column.as_deref())?;
    let data = file.data;
    let (m, d) = (data.n_samples(), data.n_features());
    let mut warnings = Vec::new();

    // The split shape is the same for every method, as in the benchmark
    // protocol; methods that skip the sweep simply leave the selection
    // split unused.
    let needs_sweep = opts.lambda.is_none() && opts.method != Method::Ols;
    if needs_sweep && opts.select_fraction == 0.0 {
        return Err(Error::invalid(
            "select_fraction",
            format!("{} picks its strength on a selection split; the fraction must be positive", opts.method),
        ));
    }
    let fractions = (
        1.0 - opts.select_fraction - opts.test_fraction,
        opts.select_fraction,
        opts.test_fraction,
    );
    if fractions.0 <= 0.0 {
        return Err(Error::invalid(
            "fractions",
            "select_fraction and test_fraction leave no training samples",
        ));
    }

    let split = make_split(m, fractions, opts.seed)?;
    let train = data.subset(&split.train)?;
    if train.n_features() >= train.n_samples() {
        warnings.push(format!(
            "{} predictors for {} training samples: least-squares stages are underdetermined and use minimum-norm solutions",
            train.n_features(),
            train.n_samples()
        ));
    }

    let cfg = BootstrapConfig {
        n_permutations: opts.n_permutations,
        ..BootstrapConfig::default()
    };
    cfg.validate()?;

    let fit = crate::parallel::with_workers(opts.workers, || -> Result<crate::model::FitResult> {
        match (opts.method, opts.lambda) {
            (Method::Ols, _) => ols_fit(&train, None),
            (Method::Ridge, Some(l)) => ridge_fit(&train, l),
            (Method::Lasso, Some(l)) => lasso_fit(&train, l, cfg.cd_tol, cfg.cd_max_iter),
            (Method::ElasticNet, Some(l)) => {
                elastic_net_fit(&train, RegularizerSpec::new(l / 2.0, l / 2.0)?, cfg.cd_tol, cfg.cd_max_iter)
            }
            (Method::Boats, _) => {
                let select = data.subset(&split.select)?;
                let null = estimate_null(
                    &train,
                    opts.n_permutations,
                    derive(opts.seed, &[FIT_NULL_STREAM]),
                )?;
                let result = boats_fit(&train, &select, &null, &cfg.thresholds)?;
                let train_loss = least_squares_loss(&result.weights, &train)?;
                Ok(crate::model::FitResult {
                    weights: result.weights,
                    meta_parameter: result.multiplier,
                    method: Method::Boats,
                    train_loss,
                    diagnostics: result.initial_fit.diagnostics.clone(),
                })
            }
            (method, None) => {
                let select = data.subset(&split.select)?;
                Ok(sweep_select(&train, &select, method, &cfg)?.0)
            }
        }
    })??;

    let (test_r2, test_bic) = if opts.test_fraction > 0.0 {
        let test = data.subset(&split.test)?;
        (Some(r_squared(&fit.weights, &test)?), Some(bic(&fit.weights, &test)?))
    } else {
        (None, None)
    };

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let weights_path = out_dir.join("weights.csv");
    let report_path = out_dir.join("report.toml");
    write_weights_csv(&weights_path, &fit.weights)?;
    let report = FitReport {
        schema_version: experiment::SCHEMA_VERSION,
        method: opts.method,
        meta_parameter: fit.meta_parameter,
        train_loss: fit.train_loss,
        support_size: fit.weights.l0_norm(),
        converged: fit.diagnostics.converged,
        rank_deficient: fit.diagnostics.rank_deficient,
        m,
        d,
        seed: opts.seed.to_string(),
        response_column: file.response_name.clone(),
        test_r2,
        test_bic,
    };
    let text = toml::to_string_pretty(&report)
        .map_err(|e| Error::Degenerate(format!("report serialization failed: {e}")))?;
    std::fs::write(&report_path, text).map_err(|e| Error::io(&report_path, e))?;

    Ok(FitOutcome {
        weights_path,
        report_path,
        method: opts.method,
        meta_parameter: fit.meta_parameter,
        support_size: fit.weights.l0_norm(),
        train_loss: fit.train_loss,
        test_r2,
        test_bic,
        converged: fit.diagnostics.converged,
        rank_deficient: fit.diagnostics.rank_deficient,
        m,
        d,
        warnings,
    })
}

/// Runs a benchmark config against `out`, resuming any compatible rows
/// already there.
pub fn cmd_benchmark(
    config_path: &Path,
    out: &Path,
    seed_override: Option<u64>,
    workers: Option<usize>,
    timing: bool,
) -> Result<BenchmarkOutcome> {
    let mut cfg = experiment::load_config(config_path)?;
    if let Some(seed) = seed_override {
        cfg.master_seed = seed;
    }
    experiment::run_benchmark(&cfg, out, workers, timing)
}

/// Returns a preset's TOML text, writing it to `out` when given.
pub fn cmd_presets(name: &str, out: Option<&Path>) -> Result<String> {
    let text = experiment::preset_toml(name)?;
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    }
    Ok(text)
}
