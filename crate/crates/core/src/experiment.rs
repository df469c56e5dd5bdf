//! Benchmark grids, configuration files, presets, and the results table.
//!
//! A benchmark config declares shared scalars (`k`, `iterations`,
//! `master_seed`, methods) plus one or more `[[grid]]` blocks; each block is
//! a cross product of distribution, sparsity, sample ratio, and noise
//! factor, and the run set is the deduplicated union of the blocks. Every
//! (cell, method) pair becomes one row of a CSV results table.
//!
//! Runs are resumable: rows already present in the output whose coordinates
//! and config hash match are kept byte for byte and not recomputed.
//! Everything is deterministic in the master seed, so interrupted and fresh
//! runs of the same config produce identical files.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{run_bootstrap, BootstrapConfig, BootstrapReport, SweepPlan};
use crate::boats::ThresholdGrid;
use crate::model::Method;
use crate::parallel;
use crate::seed::derive;
use crate::synthgen::{draw_weights, make_dataset, DistributionParams, ModelSpec, WeightDistribution};

/// Version stamp of the results-table schema, first column of every row.
pub const SCHEMA_VERSION: u32 = 1;

const CELL_STREAM: u64 = 3;
const BOOTSTRAP_STREAM: u64 = 5;

fn default_n_permutations() -> usize {
    100
}

fn default_methods() -> Vec<Method> {
    vec![Method::Ridge, Method::Lasso, Method::ElasticNet, Method::Boats]
}

/// One `[[grid]]` block: a cross product of model coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub distributions: Vec<WeightDistribution>,
    pub sparsities: Vec<f64>,
    /// Samples per predictor: `m = round(ratio * d)`.
    pub sample_ratios: Vec<f64>,
    pub noise_factors: Vec<f64>,
}

/// Sweep-shape knobs of the config file; the defaults are the standard
/// protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub coarse_log10_min: f64,
    pub coarse_log10_max: f64,
    pub coarse_points: usize,
    pub fine_points: usize,
    /// Log-space half-width of the refined pass; defaults to one coarse
    /// grid spacing.
    pub refine_factor: Option<f64>,
    pub threshold_min: f64,
    pub threshold_max: f64,
    pub threshold_points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            coarse_log10_min: -4.0,
            coarse_log10_max: 2.0,
            coarse_points: 13,
            fine_points: 15,
            refine_factor: None,
            threshold_min: 0.25,
            threshold_max: 32.0,
            threshold_points: 40,
        }
    }
}

impl SweepSection {
    pub fn sweep_plan(&self) -> Result<SweepPlan> {
        let coarse = crate::util::logspace(
            self.coarse_log10_min,
            self.coarse_log10_max,
            self.coarse_points,
        )?;
        let spacing = (self.coarse_log10_max - self.coarse_log10_min)
            / (self.coarse_points - 1) as f64;
        let factor = self.refine_factor.unwrap_or_else(|| 10f64.powf(spacing));
        SweepPlan::new(coarse, self.fine_points, factor)
    }

    pub fn threshold_grid(&self) -> Result<ThresholdGrid> {
        ThresholdGrid::geometric(self.threshold_min, self.threshold_max, self.threshold_points)
    }
}

/// A parsed benchmark configuration. Unknown keys anywhere in the file are
/// errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    /// Active coefficients in every synthetic model.
    pub k: usize,
    /// Bootstrap iterations per cell.
    pub iterations: usize,
    pub master_seed: u64,
    #[serde(default = "default_n_permutations")]
    pub n_permutations: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(rename = "grid")]
    pub grids: Vec<GridBlock>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub distribution_params: DistributionParams,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "list is empty"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::invalid("methods", "list contains duplicates"));
        }
        if self.grids.is_empty() {
            return Err(Error::invalid("grid", "need at least one [[grid]] block"));
        }
        for grid in self.experiment_grids() {
            grid.validate()?;
        }
        self.sweep.sweep_plan()?;
        self.sweep.threshold_grid()?;
        self.distribution_params.validate()?;
        Ok(())
    }

    /// One cross-product grid per `[[grid]]` block, sharing the scalars.
    pub fn experiment_grids(&self) -> Vec<ExperimentGrid> {
        self.grids
            .iter()
            .map(|g| ExperimentGrid {
                distributions: g.distributions.clone(),
                sparsities: g.sparsities.clone(),
                sample_ratios: g.sample_ratios.clone(),
                noise_factors: g.noise_factors.clone(),
                methods: self.methods.clone(),
                iterations: self.iterations,
                k: self.k,
                master_seed: self.master_seed,
            })
            .collect()
    }

    /// Deduplicated, canonically ordered (cell, method) tasks across all
    /// grid blocks.
    pub fn tasks(&self) -> Vec<(CellKey, Method)> {
        let mut set: BTreeMap<(CellKey, Method), ()> = BTreeMap::new();
        for grid in self.experiment_grids() {
            for cell in grid.cells() {
                for &method in &self.methods {
                    set.insert((cell, method), ());
                }
            }
        }
        set.into_keys().collect()
    }

    /// Stable fingerprint of everything that affects row values (not file
    /// layout): scale, seed, sweep shape, and distribution parameters.
    /// Methods and grid coordinates are excluded — they identify rows.
    pub fn config_hash(&self) -> u64 {
        let p = &self.distribution_params;
        let s = &self.sweep;
        let streams = [
            self.k as u64,
            self.iterations as u64,
            self.master_seed,
            self.n_permutations as u64,
            s.coarse_log10_min.to_bits(),
            s.coarse_log10_max.to_bits(),
            s.coarse_points as u64,
            s.fine_points as u64,
            s.refine_factor.unwrap_or(f64::NAN).to_bits(),
            s.threshold_min.to_bits(),
            s.threshold_max.to_bits(),
            s.threshold_points as u64,
            p.laplace_scale.to_bits(),
            p.uniform_halfwidth.to_bits(),
            p.uniform_dead_zone.to_bits(),
            p.symexp_peak.to_bits(),
            p.symexp_rate.to_bits(),
            p.symexp_cutoff.to_bits(),
            p.clustered_pos_mean.to_bits(),
            p.clustered_pos_sd.to_bits(),
            p.clustered_neg_mean.to_bits(),
            p.clustered_neg_sd.to_bits(),
            p.clustered_pos_fraction.to_bits(),
        ];
        derive(0xB0A75, &streams)
    }

    pub fn bootstrap_config(&self) -> Result<BootstrapConfig> {
        Ok(BootstrapConfig {
            iterations: self.iterations,
            n_permutations: self.n_permutations,
            sweep: self.sweep.sweep_plan()?,
            thresholds: self.sweep.threshold_grid()?,
            ..BootstrapConfig::default()
        })
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<BenchmarkConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: BenchmarkConfig = toml::from_str(&text).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate().map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(cfg)
}

/// A full cross-product experiment over one grid block.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub distributions: Vec<WeightDistribution>,
    pub sparsities: Vec<f64>,
    pub sample_ratios: Vec<f64>,
    pub noise_factors: Vec<f64>,
    pub methods: Vec<Method>,
    pub iterations: usize,
    pub k: usize,
    pub master_seed: u64,
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        for (name, list) in [
            ("distributions", self.distributions.len()),
            ("sparsities", self.sparsities.len()),
            ("sample_ratios", self.sample_ratios.len()),
            ("noise_factors", self.noise_factors.len()),
            ("methods", self.methods.len()),
        ] {
            if list == 0 {
                return Err(Error::invalid("grid", format!("{name} list is empty")));
            }
        }
        for &s in &self.sparsities {
            if !s.is_finite() || !(0.0..1.0).contains(&s) {
                return Err(Error::invalid("sparsities", format!("must lie in [0, 1), got {s}")));
            }
        }
        for &r in &self.sample_ratios {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::invalid("sample_ratios", format!("must be positive, got {r}")));
            }
        }
        for &c in &self.noise_factors {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::invalid(
                    "noise_factors",
                    format!("must be finite and nonnegative, got {c}"),
                ));
            }
        }
        Ok(())
    }

    /// The cross product, in canonical order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut cells = Vec::new();
        for &distribution in &self.distributions {
            for &sparsity in &self.sparsities {
                for &sample_ratio in &self.sample_ratios {
                    for &noise_factor in &self.noise_factors {
                        cells.push(CellKey {
                            distribution,
                            sparsity,
                            sample_ratio,
                            noise_factor,
                        });
                    }
                }
            }
        }
        cells
    }
}

/// Model coordinates of one benchmark cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub distribution: WeightDistribution,
    pub sparsity: f64,
    pub sample_ratio: f64,
    pub noise_factor: f64,
}

impl CellKey {
    /// Seed the cell's model, dataset, and bootstrap streams derive from.
    /// The method is deliberately absent: all methods of a cell share data
    /// and splits, so comparisons are paired.
    pub fn cell_seed(&self, master_seed: u64) -> u64 {
        derive(
            master_seed,
            &[
                CELL_STREAM,
                self.distribution as u64,
                self.sparsity.to_bits(),
                self.sample_ratio.to_bits(),
                self.noise_factor.to_bits(),
            ],
        )
    }
}

impl Eq for CellKey {}

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.distribution
            .cmp(&other.distribution)
            .then(self.sparsity.total_cmp(&other.sparsity))
            .then(self.sample_ratio.total_cmp(&other.sample_ratio))
            .then(self.noise_factor.total_cmp(&other.noise_factor))
    }
}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Aggregated metrics of one successful cell run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMetrics {
    pub mean_test_r2: f64,
    pub sd_test_r2: f64,
    pub mean_rms_error: f64,
    pub sd_rms_error: f64,
    /// Absent when the cell ran a single iteration.
    pub estimation_variability: Option<f64>,
    pub mean_test_bic: f64,
    pub sd_test_bic: f64,
    pub mean_test_residual_ms: f64,
    pub sd_test_residual_ms: f64,
    pub mean_support_ratio: f64,
    pub sd_support_ratio: f64,
    pub mean_support_size: f64,
    pub sd_support_size: f64,
    pub consensus_meta: f64,
    pub mean_chosen_meta: f64,
    pub sd_chosen_meta: f64,
}

/// One row of the results table: a (cell, method) pair with its aggregated
/// metrics, or the error that prevented them.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub cell: CellKey,
    pub method: Method,
    pub k: usize,
    pub d: usize,
    pub m: usize,
    pub iterations: usize,
    pub cell_seed: u64,
    pub config_hash: u64,
    pub metrics: Option<RowMetrics>,
    /// 0.0 unless the run recorded wall time (`--timing`).
    pub runtime_seconds: f64,
    /// Failed bootstrap iterations; the full iteration count when the whole
    /// cell failed.
    pub failures: usize,
    /// Empty on success.
    pub error: String,
}

pub const RESULTS_HEADER: [&str; 31] = [
    "schema_version",
    "distribution",
    "sparsity",
    "sample_ratio",
    "noise_factor",
    "method",
    "k",
    "d",
    "m",
    "iterations",
    "cell_seed",
    "config_hash",
    "mean_test_r2",
    "sd_test_r2",
    "mean_rms_error",
    "sd_rms_error",
    "estimation_variability",
    "mean_test_bic",
    "sd_test_bic",
    "mean_test_residual_ms",
    "sd_test_residual_ms",
    "mean_support_ratio",
    "sd_support_ratio",
    "mean_support_size",
    "sd_support_size",
    "consensus_meta",
    "mean_chosen_meta",
    "sd_chosen_meta",
    "runtime_seconds",
    "failures",
    "error",
];

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl ResultRow {
    fn to_record(&self) -> Vec<String> {
        let mut rec = vec![
            SCHEMA_VERSION.to_string(),
            self.cell.distribution.to_string(),
            fmt_f64(self.cell.sparsity),
            fmt_f64(self.cell.sample_ratio),
            fmt_f64(self.cell.noise_factor),
            self.method.to_string(),
            self.k.to_string(),
            self.d.to_string(),
            self.m.to_string(),
            self.iterations.to_string(),
            self.cell_seed.to_string(),
            format!("{:016x}", self.config_hash),
        ];
        match &self.metrics {
            Some(m) => {
                rec.extend([
                    fmt_f64(m.mean_test_r2),
                    fmt_f64(m.sd_test_r2),
                    fmt_f64(m.mean_rms_error),
                    fmt_f64(m.sd_rms_error),
                    m.estimation_variability.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(m.mean_test_bic),
                    fmt_f64(m.sd_test_bic),
                    fmt_f64(m.mean_test_residual_ms),
                    fmt_f64(m.sd_test_residual_ms),
                    fmt_f64(m.mean_support_ratio),
                    fmt_f64(m.sd_support_ratio),
                    fmt_f64(m.mean_support_size),
                    fmt_f64(m.sd_support_size),
                    fmt_f64(m.consensus_meta),
                    fmt_f64(m.mean_chosen_meta),
                    fmt_f64(m.sd_chosen_meta),
                ]);
            }
            None => rec.extend(std::iter::repeat_with(String::new).take(16)),
        }
        rec.extend([
            fmt_f64(self.runtime_seconds),
            self.failures.to_string(),
            self.error.clone(),
        ]);
        rec
    }

    fn parse_field<T: std::str::FromStr>(
        record: &csv::StringRecord,
        idx: usize,
        path: &Path,
    ) -> Result<T> {
        let raw = record.get(idx).unwrap_or_default();
        raw.parse().map_err(|_| Error::DataFormat {
            path: path.to_path_buf(),
            message: format!(
                "cannot parse {:?} in column {} of row {:?}",
                raw,
                RESULTS_HEADER[idx],
                record.position().map(|p| p.line()).unwrap_or_default()
            ),
        })
    }

    fn from_record(record: &csv::StringRecord, path: &Path) -> Result<ResultRow> {
        if record.len() != RESULTS_HEADER.len() {
            return Err(Error::DataFormat {
                path: path.to_path_buf(),
                message: format!(
                    "row {:?} has {} fields, expected {}",
                    record.position().map(|p| p.line()).unwrap_or_default(),
                    record.len(),
                    RESULTS_HEADER.len()
                ),
            });
        }
        let version: u32 = Self::parse_field(record, 0, path)?;
        if version != SCHEMA_VERSION {
            return Err(Error::DataFormat {
                path: path.to_path_buf(),
                message: format!("schema version {version} is not {SCHEMA_VERSION}"),
            });
        }
        let cell = CellKey {
            distribution: Self::parse_field(record, 1, path)?,
            sparsity: Self::parse_field(record, 2, path)?,
            sample_ratio: Self::parse_field(record, 3, path)?,
            noise_factor: Self::parse_field(record, 4, path)?,
        };
        let error_text = record.get(30).unwrap_or_default().to_string();
        let metrics = if record.get(12).unwrap_or_default().is_empty() {
            None
        } else {
            let variability_raw = record.get(16).unwrap_or_default();
            Some(RowMetrics {
                mean_test_r2: Self::parse_field(record, 12, path)?,
                sd_test_r2: Self::parse_field(record, 13, path)?,
                mean_rms_error: Self::parse_field(record, 14, path)?,
                sd_rms_error: Self::parse_field(record, 15, path)?,
                estimation_variability: if variability_raw.is_empty() {
                    None
                } else {
                    Some(Self::parse_field(record, 16, path)?)
                },
                mean_test_bic: Self::parse_field(record, 17, path)?,
                sd_test_bic: Self::parse_field(record, 18, path)?,
                mean_test_residual_ms: Self::parse_field(record, 19, path)?,
                sd_test_residual_ms: Self::parse_field(record, 20, path)?,
                mean_support_ratio: Self::parse_field(record, 21, path)?,
                sd_support_ratio: Self::parse_field(record, 22, path)?,
                mean_support_size: Self::parse_field(record, 23, path)?,
                sd_support_size: Self::parse_field(record, 24, path)?,
                consensus_meta: Self::parse_field(record, 25, path)?,
                mean_chosen_meta: Self::parse_field(record, 26, path)?,
                sd_chosen_meta: Self::parse_field(record, 27, path)?,
            })
        };
        let config_hash = u64::from_str_radix(record.get(11).unwrap_or_default(), 16).map_err(|_| {
            Error::DataFormat {
                path: path.to_path_buf(),
                message: "config_hash is not 16 hex digits".into(),
            }
        })?;
        Ok(ResultRow {
            cell,
            method: Self::parse_field(record, 5, path)?,
            k: Self::parse_field(record, 6, path)?,
            d: Self::parse_field(record, 7, path)?,
            m: Self::parse_field(record, 8, path)?,
            iterations: Self::parse_field(record, 9, path)?,
            cell_seed: Self::parse_field(record, 10, path)?,
            config_hash,
            metrics,
            runtime_seconds: Self::parse_field(record, 28, path)?,
            failures: Self::parse_field(record, 29, path)?,
            error: error_text,
        })
    }
}

/// Parses an existing results table, validating the header and schema.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = crate::tabular::open_csv(path)?;
    let header: Vec<&str> = reader.headers()?.iter().collect();
    if header != RESULTS_HEADER {
        return Err(Error::DataFormat {
            path: path.to_path_buf(),
            message: "results file has an incompatible header; move it aside or pick another --out".into(),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(ResultRow::from_record(&record?, path)?);
    }
    Ok(rows)
}

/// Writes a results table atomically (write to sibling temp file, rename).
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut writer = crate::tabular::create_csv(&tmp)?;
        writer.write_record(RESULTS_HEADER)?;
        for row in rows {
            writer.write_record(row.to_record())?;
        }
        writer.flush().map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Counts from one benchmark invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchmarkOutcome {
    /// (cell, method) tasks in the config.
    pub total: usize,
    /// Rows computed in this invocation.
    pub computed: usize,
    /// Rows reused from the existing output file.
    pub reused: usize,
    /// Rows (computed or reused) carrying a cell-level error.
    pub failed_cells: usize,
}

/// Runs every (cell, method) task of the config, resuming from `out` when it
/// already holds rows of the same config hash, and rewrites `out` in
/// canonical order.
pub fn run_benchmark(
    cfg: &BenchmarkConfig,
    out: &Path,
    workers: Option<usize>,
    timing: bool,
) -> Result<BenchmarkOutcome> {
    cfg.validate()?;
    let hash = cfg.config_hash();
    let tasks = cfg.tasks();

    let mut existing: BTreeMap<(CellKey, Method), ResultRow> = BTreeMap::new();
    if out.exists() {
        for row in read_results(out)? {
            existing.insert((row.cell, row.method), row);
        }
    }

    let mut reused: Vec<ResultRow> = Vec::new();
    let mut todo: Vec<(CellKey, Method)> = Vec::new();
    for task in &tasks {
        match existing.get(task) {
            Some(row) if row.config_hash == hash => reused.push(row.clone()),
            _ => todo.push(*task),
        }
    }

    let bootstrap_cfg = cfg.bootstrap_config()?;
    let computed: Vec<ResultRow> = parallel::with_workers(workers, || {
        parallel::map_indexed(todo.len(), |i| {
            let (cell, method) = todo[i];
            run_cell(cfg, &bootstrap_cfg, cell, method, timing)
        })
    })?;

    let mut merged: BTreeMap<(CellKey, Method), ResultRow> = BTreeMap::new();
    for row in reused.iter().chain(computed.iter()) {
        merged.insert((row.cell, row.method), row.clone());
    }
    let rows: Vec<ResultRow> = merged.into_values().collect();
    write_results(out, &rows)?;

    Ok(BenchmarkOutcome {
        total: tasks.len(),
        computed: computed.len(),
        reused: reused.len(),
        failed_cells: rows.iter().filter(|r| !r.error.is_empty()).count(),
    })
}

fn run_cell(
    cfg: &BenchmarkConfig,
    bootstrap_cfg: &BootstrapConfig,
    cell: CellKey,
    method: Method,
    timing: bool,
) -> ResultRow {
    let start = Instant::now();
    let cell_seed = cell.cell_seed(cfg.master_seed);
    let mut row = ResultRow {
        cell,
        method,
        k: cfg.k,
        d: 0,
        m: 0,
        iterations: cfg.iterations,
        cell_seed,
        config_hash: cfg.config_hash(),
        metrics: None,
        runtime_seconds: 0.0,
        failures: 0,
        error: String::new(),
    };
    match compute_cell(cfg, bootstrap_cfg, cell, method, cell_seed) {
        Ok((d, m, report)) => {
            row.d = d;
            row.m = m;
            row.failures = report.failures;
            let rms = report.rms_error.expect("benchmark always has ground truth");
            let ratio = report.support_ratio.expect("benchmark always has ground truth");
            row.metrics = Some(RowMetrics {
                mean_test_r2: report.test_r2.mean,
                sd_test_r2: report.test_r2.sd,
                mean_rms_error: rms.mean,
                sd_rms_error: rms.sd,
                estimation_variability: report.estimation_variability,
                mean_test_bic: report.test_bic.mean,
                sd_test_bic: report.test_bic.sd,
                mean_test_residual_ms: report.test_residual_ms.mean,
                sd_test_residual_ms: report.test_residual_ms.sd,
                mean_support_ratio: ratio.mean,
                sd_support_ratio: ratio.sd,
                mean_support_size: report.support_size.mean,
                sd_support_size: report.support_size.sd,
                consensus_meta: report.consensus_meta,
                mean_chosen_meta: report.chosen_meta.mean,
                sd_chosen_meta: report.chosen_meta.sd,
            });
        }
        Err(e) => {
            row.failures = cfg.iterations;
            row.error = e.to_string();
        }
    }
    if timing {
        row.runtime_seconds = start.elapsed().as_secs_f64();
    }
    row
}

fn compute_cell(
    cfg: &BenchmarkConfig,
    bootstrap_cfg: &BootstrapConfig,
    cell: CellKey,
    method: Method,
    cell_seed: u64,
) -> Result<(usize, usize, BootstrapReport)> {
    let spec = ModelSpec {
        distribution: cell.distribution,
        k: cfg.k,
        sparsity: cell.sparsity,
        noise_factor: cell.noise_factor,
        seed: cell_seed,
        params: cfg.distribution_params,
    };
    let d = spec.dimension()?;
    let m = (cell.sample_ratio * d as f64).round() as usize;
    let truth = draw_weights(&spec)?;
    let data = make_dataset(&truth, m, cell_seed)?;
    let report = run_bootstrap(
        &data,
        Some(&truth),
        method,
        bootstrap_cfg,
        derive(cell_seed, &[BOOTSTRAP_STREAM]),
    )?;
    Ok((d, m, report))
}

/// Built-in benchmark configurations.
pub fn preset_names() -> [&'static str; 5] {
    ["fig2", "fig3", "fig4", "fig5", "desk"]
}

fn block(
    distributions: Vec<WeightDistribution>,
    sparsities: Vec<f64>,
    sample_ratios: Vec<f64>,
    noise_factors: Vec<f64>,
) -> GridBlock {
    GridBlock {
        distributions,
        sparsities,
        sample_ratios,
        noise_factors,
    }
}

/// A named built-in config. `fig2` through `fig5` are the full-scale
/// benchmark families (k = 100, 100 iterations); `desk` is the same set of
/// regimes at k = 20 with 20 iterations, sized so the full grid runs in
/// minutes on a laptop.
pub fn preset(name: &str) -> Result<BenchmarkConfig> {
    use WeightDistribution::*;
    let two_thirds = 2.0 / 3.0;
    let base = BenchmarkConfig {
        k: 100,
        iterations: 100,
        master_seed: 42,
        n_permutations: 100,
        methods: default_methods(),
        grids: Vec::new(),
        sweep: SweepSection::default(),
        distribution_params: DistributionParams::default(),
    };
    let spread = vec![0.2, 0.4, 0.5, two_thirds, 0.8, 0.9];
    let cfg = match name {
        "fig2" => BenchmarkConfig {
            grids: vec![block(
                vec![SymmetricIncreasingExponential],
                vec![two_thirds],
                vec![5.0],
                vec![0.2],
            )],
            ..base
        },
        "fig3" => BenchmarkConfig {
            grids: vec![block(
                vec![SymmetricIncreasingExponential],
                spread,
                vec![1.0, 2.0, 3.0, 5.0, 8.0],
                vec![0.2],
            )],
            ..base
        },
        "fig4" => BenchmarkConfig {
            grids: vec![block(
                WeightDistribution::ALL.to_vec(),
                spread,
                vec![3.0],
                vec![0.2],
            )],
            ..base
        },
        "fig5" => BenchmarkConfig {
            grids: vec![block(
                vec![AsymmetricClustered],
                vec![0.66],
                vec![5.0],
                vec![0.0, 0.02, 0.05, 0.1, 0.2, 0.5],
            )],
            ..base
        },
        "desk" => BenchmarkConfig {
            k: 20,
            iterations: 20,
            grids: vec![
                block(
                    vec![SymmetricIncreasingExponential],
                    vec![two_thirds],
                    vec![5.0],
                    vec![0.2],
                ),
                block(
                    vec![AsymmetricClustered],
                    vec![0.66],
                    vec![5.0],
                    vec![0.0, 0.02, 0.05, 0.1, 0.2, 0.5],
                ),
                block(
                    WeightDistribution::ALL.to_vec(),
                    vec![0.5, two_thirds],
                    vec![3.0],
                    vec![0.2],
                ),
                block(vec![SymmetricIncreasingExponential], vec![0.5], vec![1.0], vec![0.2]),
            ],
            ..base
        },
        other => {
            return Err(Error::invalid(
                "preset",
                format!("unknown preset {other:?}; available: {}", preset_names().join(", ")),
            ))
        }
    };
    Ok(cfg)
}

/// Serializes a config as TOML text.
pub fn config_to_toml(cfg: &BenchmarkConfig) -> Result<String> {
    toml::to_string_pretty(cfg).map_err(|e| Error::Degenerate(format!("config serialization failed: {e}")))
}

/// Convenience used by tests and examples: preset text exactly as the CLI
/// writes it.
pub fn preset_toml(name: &str) -> Result<String> {
    config_to_toml(&preset(name)?)
}
