//! Data splitting, fit metrics, and the bootstrapped selection protocol.
//!
//! The protocol: repeat `iterations` times with fresh random train / select /
//! test splits — fit on train across a meta-parameter sweep, pick the sweep
//! point by selection loss, score that fit on test. Per-iteration choices
//! feed the reported metrics; a consensus meta-parameter (best mean
//! selection loss across iterations) defines the expected weight vector.
//! Splits depend only on the master seed and iteration index, so different
//! methods see identical resamples and compare paired.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boats::{boats_fit, estimate_null, NullWeightProfile, ThresholdGrid};
use crate::error::{Error, Result};
use crate::model::{least_squares_loss, ols_fit, Dataset, Method, WeightVector};
use crate::parallel;
use crate::regularizers::{
    elastic_net_fit, elastic_net_path, lasso_fit, lasso_path, ridge_fit, RegularizerSpec,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::seed::derive;
use crate::synthgen::GroundTruth;
use crate::util::{logspace, mean_sd};

/// Train / select / test shares of the samples.
pub const DEFAULT_FRACTIONS: (f64, f64, f64) = (0.8, 0.1, 0.1);

/// Residual mean squares are floored here before entering a logarithm, so an
/// interpolating fit yields a huge negative information score instead of
/// negative infinity.
pub const BIC_FLOOR: f64 = 1e-300;

/// Index sets of one train / select / test split, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub train: Vec<usize>,
    pub select: Vec<usize>,
    pub test: Vec<usize>,
}

/// Randomly assigns `floor(m * fraction)` samples to each part, disjointly;
/// leftover samples (from flooring) are unused. A positive fraction that
/// floors to zero samples is an error, a zero fraction is an empty part.
pub fn make_split(m: usize, fractions: (f64, f64, f64), seed: u64) -> Result<SplitPlan> {
    let (ft, fs, fe) = fractions;
    for (name, f) in [("train fraction", ft), ("select fraction", fs), ("test fraction", fe)] {
        if !f.is_finite() || f < 0.0 {
            return Err(Error::invalid(
                "fractions",
                format!("{name} must be finite and nonnegative, got {f}"),
            ));
        }
    }
    if ft + fs + fe > 1.0 + 1e-12 {
        return Err(Error::invalid(
            "fractions",
            format!("must sum to at most 1, got {}", ft + fs + fe),
        ));
    }
    if m == 0 {
        return Err(Error::invalid("split", "no samples to split"));
    }

    let sizes = [
        ("train", ft, (m as f64 * ft).floor() as usize),
        ("select", fs, (m as f64 * fs).floor() as usize),
        ("test", fe, (m as f64 * fe).floor() as usize),
    ];
    for (name, f, n) in sizes {
        if f > 0.0 && n == 0 {
            return Err(Error::Degenerate(format!(
                "{m} samples are too few for a nonempty {name} set at fraction {f}"
            )));
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let (n_train, n_select, n_test) = (sizes[0].2, sizes[1].2, sizes[2].2);
    let mut train = order[..n_train].to_vec();
    let mut select = order[n_train..n_train + n_select].to_vec();
    let mut test = order[n_train + n_select..n_train + n_select + n_test].to_vec();
    train.sort_unstable();
    select.sort_unstable();
    test.sort_unstable();
    Ok(SplitPlan { train, select, test })
}

/// `folds` cross-validation splits of `0..m`: each sample lands in exactly
/// one validation fold; fold sizes differ by at most one. Provided for
/// external use; the bootstrap protocol below uses fresh random splits
/// instead.
pub fn vfold_splits(m: usize, folds: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if folds < 2 || folds > m {
        return Err(Error::invalid(
            "folds",
            format!("need 2 <= folds <= samples, got {folds} folds for {m} samples"),
        ));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let base = m / folds;
    let extra = m % folds;
    let mut splits = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        let mut validation = order[start..start + len].to_vec();
        let mut train: Vec<usize> = order[..start]
            .iter()
            .chain(order[start + len..].iter())
            .copied()
            .collect();
        validation.sort_unstable();
        train.sort_unstable();
        splits.push((train, validation));
        start += len;
    }
    Ok(splits)
}

/// Coefficient of determination `1 - SSE/SST` on `data`. Errors on constant
/// responses, where the statistic is undefined.
pub fn r_squared(weights: &WeightVector, data: &Dataset) -> Result<f64> {
    let sse = least_squares_loss(weights, data)?;
    let y = data.outputs();
    let mean = y.sum() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if sst == 0.0 {
        return Err(Error::Degenerate(
            "responses are constant; coefficient of determination is undefined".into(),
        ));
    }
    Ok(1.0 - sse / sst)
}

/// Information score `T ln(SSE/(T-1)) + k ln T` with `k` the exact nonzero
/// count; the residual mean square is floored at [`BIC_FLOOR`] so perfect
/// fits stay finite.
pub fn bic(weights: &WeightVector, data: &Dataset) -> Result<f64> {
    let t = data.n_samples();
    if t < 2 {
        return Err(Error::invalid(
            "bic",
            format!("needs at least 2 samples, got {t}"),
        ));
    }
    let sse = least_squares_loss(weights, data)?;
    let rms = (sse / (t - 1) as f64).max(BIC_FLOOR);
    let t = t as f64;
    Ok(t * rms.ln() + weights.l0_norm() as f64 * t.ln())
}

/// Root mean square coefficient error between an estimate and the truth.
pub fn rms_error(estimate: &WeightVector, truth: &WeightVector) -> Result<f64> {
    if estimate.dim() != truth.dim() {
        return Err(Error::DimensionMismatch {
            context: "rms_error",
            expected: truth.dim(),
            found: estimate.dim(),
            unit: "coefficients",
        });
    }
    let d = truth.dim() as f64;
    let ss: f64 = estimate
        .as_slice()
        .iter()
        .zip(truth.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / d).sqrt())
}

/// Mean per-coordinate spread of repeated estimates: average over
/// coordinates of the unbiased standard deviation across the given weight
/// vectors. Needs at least two vectors of equal dimension.
pub fn estimation_variability(estimates: &[WeightVector]) -> Result<f64> {
    let n = estimates.len();
    if n < 2 {
        return Err(Error::invalid(
            "estimation_variability",
            format!("needs at least 2 estimates, got {n}"),
        ));
    }
    let d = estimates[0].dim();
    if let Some(w) = estimates.iter().find(|w| w.dim() != d) {
        return Err(Error::DimensionMismatch {
            context: "estimation_variability",
            expected: d,
            found: w.dim(),
            unit: "coefficients",
        });
    }
    let mut total = 0.0;
    for j in 0..d {
        let column: Vec<f64> = estimates.iter().map(|w| w.as_slice()[j]).collect();
        total += mean_sd(&column).1;
    }
    Ok(total / d as f64)
}

/// Selected-model size relative to the true one: `||estimate||_0 / k`.
pub fn support_ratio(estimate: &WeightVector, truth: &GroundTruth) -> Result<f64> {
    if estimate.dim() != truth.weights.dim() {
        return Err(Error::DimensionMismatch {
            context: "support_ratio",
            expected: truth.weights.dim(),
            found: estimate.dim(),
            unit: "coefficients",
        });
    }
    Ok(estimate.l0_norm() as f64 / truth.support.k() as f64)
}

/// Meta-parameter sweep for the penalized baselines: a fixed coarse grid,
/// then a refined pass around the coarse optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// Ascending positive penalty strengths.
    pub coarse: Vec<f64>,
    /// Points in the refined pass (the center point reuses the coarse fit).
    pub fine_points: usize,
    /// Half-width of the refined pass in log space: the refined grid spans
    /// `center / refine_factor` to `center * refine_factor`.
    pub refine_factor: f64,
}

impl SweepPlan {
    pub fn new(coarse: Vec<f64>, fine_points: usize, refine_factor: f64) -> Result<Self> {
        if coarse.is_empty() {
            return Err(Error::invalid("sweep", "coarse grid is empty"));
        }
        if coarse.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(Error::invalid("sweep", "coarse grid must be positive and finite"));
        }
        if coarse.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep", "coarse grid must be strictly increasing"));
        }
        if fine_points < 2 {
            return Err(Error::invalid("sweep", "refined pass needs at least 2 points"));
        }
        if !refine_factor.is_finite() || refine_factor <= 1.0 {
            return Err(Error::invalid("sweep", "refine_factor must exceed 1"));
        }
        Ok(SweepPlan {
            coarse,
            fine_points,
            refine_factor,
        })
    }

    /// Refined grid around `center`: `fine_points` values
    /// `center * refine_factor^t` for `t` evenly spaced over `[-1, 1]`,
    /// excluding `t = 0` (already evaluated in the coarse pass).
    pub fn refined_grid(&self, center: f64) -> Vec<f64> {
        let n = self.fine_points;
        let c = (n - 1) as f64 / 2.0;
        (0..n)
            .filter(|&i| i as f64 != c)
            .map(|i| center * self.refine_factor.powf((i as f64 - c) / c))
            .collect()
    }
}

impl Default for SweepPlan {
    /// 13 strengths log-spaced over `[1e-4, 1e2]`, then 15 refined points
    /// spanning one coarse grid spacing (`10^0.5`) either side.
    fn default() -> Self {
        SweepPlan {
            coarse: logspace(-4.0, 2.0, 13).expect("default grid parameters are valid"),
            fine_points: 15,
            refine_factor: 10f64.powf(0.5),
        }
    }
}

/// Controls for one bootstrapped selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub fractions: (f64, f64, f64),
    /// Penalty sweep for ridge / lasso / elastic net.
    pub sweep: SweepPlan,
    /// Multiplier grid for the threshold method.
    pub thresholds: ThresholdGrid,
    /// Response permutations behind each null profile.
    pub n_permutations: usize,
    pub cd_tol: f64,
    pub cd_max_iter: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iterations: 100,
            fractions: DEFAULT_FRACTIONS,
            sweep: SweepPlan::default(),
            thresholds: ThresholdGrid::default(),
            n_permutations: 100,
            cd_tol: DEFAULT_TOL,
            cd_max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        let (ft, fs, fe) = self.fractions;
        if ft <= 0.0 || fs <= 0.0 || fe <= 0.0 {
            return Err(Error::invalid(
                "fractions",
                "the protocol needs nonempty train, select, and test sets",
            ));
        }
        if self.n_permutations == 0 {
            return Err(Error::invalid("n_permutations", "must be at least 1"));
        }
        if !self.cd_tol.is_finite() || self.cd_tol <= 0.0 {
            return Err(Error::invalid("cd_tol", "must be positive"));
        }
        if self.cd_max_iter == 0 {
            return Err(Error::invalid("cd_max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// One bootstrap iteration: what was chosen and how it scored on test.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Seed this iteration's split (and permutation stream) derived from.
    pub seed: u64,
    /// Meta-parameter picked by selection loss.
    pub chosen_meta: f64,
    /// Weights fitted on train at `chosen_meta`.
    pub weights: WeightVector,
    pub test_r2: f64,
    pub test_bic: f64,
    /// Unfloored test residual mean square `SSE/(T-1)`.
    pub test_residual_ms: f64,
    pub support_size: usize,
    /// Against ground truth, when one is known.
    pub rms_error: Option<f64>,
    pub support_ratio: Option<f64>,
    /// `(meta, selection loss)` over the full sweep, ascending meta.
    pub select_curve: Vec<(f64, f64)>,
}

/// Mean and unbiased standard deviation over iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    pub sd: f64,
}

fn summarize(values: &[f64]) -> MetricSummary {
    let (mean, sd) = mean_sd(values);
    MetricSummary { mean, sd }
}

/// Outcome of a full bootstrapped selection run for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapReport {
    pub method: Method,
    /// Records of the successful iterations, in iteration order.
    pub per_iteration: Vec<IterationRecord>,
    /// Iterations dropped by the failure policy (at most 10%).
    pub failures: usize,
    /// Meta-parameter with the best mean selection loss across iterations.
    pub consensus_meta: f64,
    /// Coordinate-wise mean of per-iteration refits at `consensus_meta`.
    pub beta_opt_expected: WeightVector,
    pub test_r2: MetricSummary,
    pub test_bic: MetricSummary,
    pub test_residual_ms: MetricSummary,
    pub support_size: MetricSummary,
    pub chosen_meta: MetricSummary,
    /// Present when a ground truth was supplied.
    pub rms_error: Option<MetricSummary>,
    pub support_ratio: Option<MetricSummary>,
    /// Mean per-coordinate spread of the per-iteration weights; needs at
    /// least two successful iterations.
    pub estimation_variability: Option<f64>,
}

const ITERATION_STREAM: u64 = 1;
const NULL_STREAM: u64 = 2;

struct IterationOutcome {
    record: IterationRecord,
    /// Cached so the consensus refit reuses the expensive null profile.
    null: Option<NullWeightProfile>,
}

/// Runs the full protocol for one method. Iterations are independent and
/// deterministic in `master_seed`; a failed iteration is skipped unless
/// failures exceed 10% of the total, which fails the run.
pub fn run_bootstrap(
    data: &Dataset,
    truth: Option<&GroundTruth>,
    method: Method,
    cfg: &BootstrapConfig,
    master_seed: u64,
) -> Result<BootstrapReport> {
    cfg.validate()?;
    if let Some(t) = truth {
        if t.weights.dim() != data.n_features() {
            return Err(Error::DimensionMismatch {
                context: "ground truth",
                expected: data.n_features(),
                found: t.weights.dim(),
                unit: "coefficients",
            });
        }
    }

    let outcomes: Vec<Result<IterationOutcome>> = parallel::map_indexed(cfg.iterations, |i| {
        run_iteration(data, truth, method, cfg, master_seed, i)
    });

    let mut ok: Vec<IterationOutcome> = Vec::with_capacity(cfg.iterations);
    let mut failures = 0;
    let mut first_error: Option<String> = None;
    for outcome in outcomes {
        match outcome {
            Ok(o) => ok.push(o),
            Err(e) => {
                failures += 1;
                first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let limit = cfg.iterations / 10;
    if failures > limit {
        return Err(Error::TooManyFailures {
            failures,
            total: cfg.iterations,
            limit,
            first: first_error.unwrap_or_default(),
        });
    }

    let consensus_meta = consensus(&ok);

    // Refit every iteration at the consensus meta-parameter; the mean of
    // those refits is the expected weight vector.
    let refits: Vec<Result<WeightVector>> = parallel::map_indexed(ok.len(), |idx| {
        let outcome = &ok[idx];
        let split = make_split(data.n_samples(), cfg.fractions, outcome.record.seed)?;
        let train = data.subset(&split.train)?;
        fit_single(&train, method, consensus_meta, cfg, outcome.null.as_ref())
    });
    let mut beta_sum = nalgebra::DVector::zeros(data.n_features());
    for refit in refits {
        beta_sum += refit?.values();
    }
    let beta_opt_expected = WeightVector::from_column(beta_sum / ok.len() as f64)?;

    let records: Vec<IterationRecord> = ok.into_iter().map(|o| o.record).collect();
    let collect = |f: &dyn Fn(&IterationRecord) -> f64| -> Vec<f64> {
        records.iter().map(f).collect()
    };
    let estimation_variability = if records.len() >= 2 {
        let weights: Vec<WeightVector> = records.iter().map(|r| r.weights.clone()).collect();
        Some(crate::evaluation::estimation_variability(&weights)?)
    } else {
        None
    };

    Ok(BootstrapReport {
        method,
        failures,
        consensus_meta,
        beta_opt_expected,
        test_r2: summarize(&collect(&|r| r.test_r2)),
        test_bic: summarize(&collect(&|r| r.test_bic)),
        test_residual_ms: summarize(&collect(&|r| r.test_residual_ms)),
        support_size: summarize(&collect(&|r| r.support_size as f64)),
        chosen_meta: summarize(&collect(&|r| r.chosen_meta)),
        rms_error: truth.map(|_| summarize(&collect(&|r| r.rms_error.unwrap_or(f64::NAN)))),
        support_ratio: truth.map(|_| summarize(&collect(&|r| r.support_ratio.unwrap_or(f64::NAN)))),
        estimation_variability,
        per_iteration: records,
    })
}

fn run_iteration(
    data: &Dataset,
    truth: Option<&GroundTruth>,
    method: Method,
    cfg: &BootstrapConfig,
    master_seed: u64,
    index: usize,
) -> Result<IterationOutcome> {
    let iter_seed = derive(master_seed, &[ITERATION_STREAM, index as u64]);
    let split = make_split(data.n_samples(), cfg.fractions, iter_seed)?;
    let train = data.subset(&split.train)?;
    let select = data.subset(&split.select)?;
    let test = data.subset(&split.test)?;

    let (chosen_meta, weights, select_curve, null) = match method {
        Method::Ols => {
            let fit = ols_fit(&train, None)?;
            let loss = least_squares_loss(&fit.weights, &select)?;
            (0.0, fit.weights, vec![(0.0, loss)], None)
        }
        Method::Ridge | Method::Lasso | Method::ElasticNet => {
            let (fit, curve) = sweep_select(&train, &select, method, cfg)?;
            (fit.meta_parameter, fit.weights, curve, None)
        }
        Method::Boats => {
            let null = estimate_null(
                &train,
                cfg.n_permutations,
                derive(iter_seed, &[NULL_STREAM]),
            )?;
            let result = boats_fit(&train, &select, &null, &cfg.thresholds)?;
            (result.multiplier, result.weights, result.curve, Some(null))
        }
    };

    let test_r2 = r_squared(&weights, &test)?;
    let test_bic = bic(&weights, &test)?;
    let sse = least_squares_loss(&weights, &test)?;
    let test_residual_ms = sse / (test.n_samples() - 1) as f64;
    let rms = truth.map(|t| rms_error(&weights, &t.weights)).transpose()?;
    let ratio = truth.map(|t| support_ratio(&weights, t)).transpose()?;

    Ok(IterationOutcome {
        record: IterationRecord {
            seed: iter_seed,
            chosen_meta,
            support_size: weights.l0_norm(),
            weights,
            test_r2,
            test_bic,
            test_residual_ms,
            rms_error: rms,
            support_ratio: ratio,
            select_curve,
        },
        null,
    })
}

/// Coarse-then-refined penalty sweep for one train / select pair. Returns
/// the chosen fit (its `meta_parameter` is the winning penalty) and the full
/// `(penalty, selection loss)` curve ascending. Ties in the selection loss
/// go to the smallest penalty evaluated.
pub fn sweep_select(
    train: &Dataset,
    select: &Dataset,
    method: Method,
    cfg: &BootstrapConfig,
) -> Result<(crate::model::FitResult, Vec<(f64, f64)>)> {
    // Ties go to the smallest penalty: entries are kept ascending and
    // min_by keeps the last minimum, so ties break by index explicitly.
    fn first_min(entries: &[(f64, f64, crate::model::FitResult)]) -> usize {
        entries
            .iter()
            .enumerate()
            .min_by(|(ia, a), (ib, b)| {
                a.1.partial_cmp(&b.1)
                    .expect("losses are finite")
                    .then(ia.cmp(ib))
            })
            .expect("sweep is nonempty")
            .0
    }

    let coarse = cfg.sweep.coarse.clone();
    let coarse_fits = fit_path(train, method, &coarse, cfg)?;
    let mut entries: Vec<(f64, f64, crate::model::FitResult)> = Vec::new();
    for (lambda, fit) in coarse.iter().zip(coarse_fits) {
        entries.push((*lambda, least_squares_loss(&fit.weights, select)?, fit));
    }
    let coarse_best = entries[first_min(&entries)].0;

    // A refined point can land bitwise on a coarse one (the grids share a
    // 10^0.5 spacing); scoring it twice would put duplicates on the curve.
    let mut fine = cfg.sweep.refined_grid(coarse_best);
    fine.retain(|l| !coarse.contains(l));
    let fine_fits = fit_path(train, method, &fine, cfg)?;
    for (lambda, fit) in fine.iter().zip(fine_fits) {
        entries.push((*lambda, least_squares_loss(&fit.weights, select)?, fit));
    }

    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("penalties are finite"));
    let best = entries[first_min(&entries)].2.clone();
    let curve = entries.iter().map(|(l, loss, _)| (*l, *loss)).collect();
    Ok((best, curve))
}

/// Fits one baseline at every penalty in `lambdas`, warm-starting the
/// coordinate-descent methods along a descending-penalty path. Results align
/// with the input order. The scalar penalty maps to an equal elastic-net
/// split `(lambda/2, lambda/2)`.
fn fit_path(
    train: &Dataset,
    method: Method,
    lambdas: &[f64],
    cfg: &BootstrapConfig,
) -> Result<Vec<crate::model::FitResult>> {
    match method {
        Method::Ridge => lambdas.iter().map(|&l| ridge_fit(train, l)).collect(),
        Method::Lasso => lasso_path(train, lambdas, cfg.cd_tol, cfg.cd_max_iter),
        Method::ElasticNet => {
            let specs: Vec<RegularizerSpec> = lambdas
                .iter()
                .map(|&l| RegularizerSpec::new(l / 2.0, l / 2.0))
                .collect::<Result<_>>()?;
            elastic_net_path(train, &specs, cfg.cd_tol, cfg.cd_max_iter)
        }
        Method::Ols | Method::Boats => Err(Error::invalid(
            "sweep",
            format!("{method} has no penalty path"),
        )),
    }
}

/// One fit at a fixed meta-parameter, used by the consensus pass. For the
/// threshold method the cached null profile from the iteration is reused.
fn fit_single(
    train: &Dataset,
    method: Method,
    meta: f64,
    cfg: &BootstrapConfig,
    null: Option<&NullWeightProfile>,
) -> Result<WeightVector> {
    match method {
        Method::Ols => Ok(ols_fit(train, None)?.weights),
        Method::Ridge => Ok(ridge_fit(train, meta)?.weights),
        Method::Lasso => Ok(lasso_fit(train, meta, cfg.cd_tol, cfg.cd_max_iter)?.weights),
        Method::ElasticNet => {
            let spec = RegularizerSpec::new(meta / 2.0, meta / 2.0)?;
            Ok(elastic_net_fit(train, spec, cfg.cd_tol, cfg.cd_max_iter)?.weights)
        }
        Method::Boats => {
            let null = null.ok_or_else(|| {
                Error::Degenerate("threshold refit requires the iteration's null profile".into())
            })?;
            let initial = ols_fit(train, None)?;
            let (thresholded, _) = crate::boats::threshold_weights(&initial.weights, null, meta)?;
            Ok(ols_fit(train, Some(&thresholded.support()))?.weights)
        }
    }
}

/// Best mean selection loss across iterations, over the meta-parameters
/// present in every iteration's sweep (the coarse and threshold grids are
/// fixed, so candidates always exist). Ties go to the smallest value.
fn consensus(outcomes: &[IterationOutcome]) -> f64 {
    let n = outcomes.len();
    let mut acc: BTreeMap<u64, (usize, f64)> = BTreeMap::new();
    for outcome in outcomes {
        let mut per: BTreeMap<u64, f64> = BTreeMap::new();
        for &(meta, loss) in &outcome.record.select_curve {
            let slot = per.entry(meta.to_bits()).or_insert(f64::INFINITY);
            *slot = slot.min(loss);
        }
        for (bits, loss) in per {
            let slot = acc.entry(bits).or_insert((0, 0.0));
            slot.0 += 1;
            slot.1 += loss;
        }
    }
    let mut best: Option<(f64, f64)> = None;
    // Ascending bit patterns of nonnegative floats are ascending values, so
    // ties resolve to the smallest meta-parameter.
    for (bits, (count, sum)) in acc {
        if count != n {
            continue;
        }
        let mean = sum / n as f64;
        if best.map_or(true, |(_, b)| mean < b) {
            best = Some((f64::from_bits(bits), mean));
        }
    }
    best.expect("at least one shared meta-parameter").0
}
