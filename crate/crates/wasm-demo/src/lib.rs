//! JSON-in / JSON-out operations behind the browser demo page.
//!
//! Each exported function takes one JSON request string and returns an
//! envelope `{"ok": true, "value": ...}` or `{"ok": false, "error": "..."}`,
//! so the JavaScript side never deals with exceptions. The same functions
//! compile and run natively, which is how they are unit tested.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use boats::boats::{boats_fit, estimate_null, threshold_weights, ThresholdGrid};
use boats::evaluation::{make_split, r_squared, rms_error, sweep_select, BootstrapConfig};
use boats::model::Method;
use boats::seed::derive;
use boats::synthgen::{draw_weights, make_dataset, ModelSpec, WeightDistribution};
use boats::Dataset;

/// Permutations behind the null profile. Fixed low so a fit stays
/// interactive at the largest sizes the request caps allow.
const N_PERMUTATIONS: usize = 50;

/// Request caps. The page runs on one thread; these bound a fit to roughly
/// a second of work at the extremes.
const MAX_K: usize = 32;
const MAX_SPARSITY: f64 = 0.8;
const MAX_SAMPLE_RATIO: f64 = 8.0;
const MAX_NOISE_FACTOR: f64 = 2.0;
const MAX_DRAWS: usize = 50_000;
const MAX_BINS: usize = 200;

/// One synthetic instance: a weight family, its size knobs, and a seed.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRequest {
    pub distribution: String,
    /// Active coefficients.
    pub k: usize,
    /// Fraction of irrelevant predictors.
    pub sparsity: f64,
    /// Noise factor `c` in `sigma = sqrt(c * sum|beta|)`.
    pub noise_factor: f64,
    /// Samples per predictor; `m = round(ratio * d)`.
    pub sample_ratio: f64,
    pub seed: u64,
}

/// The instance realized: data, its generating truth, and a split.
struct Instance {
    truth: boats::synthgen::GroundTruth,
    d: usize,
    m: usize,
    train: Dataset,
    select: Dataset,
    test: Dataset,
}

fn build_instance(req: &InstanceRequest) -> Result<Instance, String> {
    if req.k == 0 || req.k > MAX_K {
        return Err(format!("k must be in 1..={MAX_K}"));
    }
    if !(0.0..=MAX_SPARSITY).contains(&req.sparsity) {
        return Err(format!("sparsity must be in [0, {MAX_SPARSITY}]"));
    }
    if !(0.0..=MAX_NOISE_FACTOR).contains(&req.noise_factor) {
        return Err(format!("noise_factor must be in [0, {MAX_NOISE_FACTOR}]"));
    }
    if !(1.0..=MAX_SAMPLE_RATIO).contains(&req.sample_ratio) {
        return Err(format!("sample_ratio must be in [1, {MAX_SAMPLE_RATIO}]"));
    }
    let distribution: WeightDistribution = req.distribution.parse().map_err(err_string)?;
    let spec = ModelSpec {
        distribution,
        k: req.k,
        sparsity: req.sparsity,
        noise_factor: req.noise_factor,
        seed: req.seed,
        params: Default::default(),
    };
    let d = spec.dimension().map_err(err_string)?;
    let m = (req.sample_ratio * d as f64).round() as usize;
    if m < 10 {
        return Err(format!(
            "m = round(sample_ratio * d) = {m} is too small to split; raise k or sample_ratio"
        ));
    }

    let truth = draw_weights(&spec).map_err(err_string)?;
    let data = make_dataset(&truth, m, derive(req.seed, &[1])).map_err(err_string)?;
    let split = make_split(m, (0.8, 0.1, 0.1), derive(req.seed, &[2])).map_err(err_string)?;
    Ok(Instance {
        truth,
        d,
        m,
        train: data.subset(&split.train).map_err(err_string)?,
        select: data.subset(&split.select).map_err(err_string)?,
        test: data.subset(&split.test).map_err(err_string)?,
    })
}

/// One method's estimate on the shared instance.
#[derive(Debug, Serialize)]
pub struct MethodEstimate {
    pub method: String,
    pub weights: Vec<f64>,
    pub support_size: usize,
    /// Chosen penalty, or chosen threshold multiplier for boats.
    pub meta_parameter: f64,
    pub rms_error: f64,
    pub test_r2: f64,
}

#[derive(Debug, Serialize)]
pub struct RecoverResponse {
    pub d: usize,
    pub m: usize,
    pub noise_sigma: f64,
    pub true_weights: Vec<f64>,
    pub true_support: Vec<usize>,
    pub estimates: Vec<MethodEstimate>,
}

fn recover_impl(req: &InstanceRequest) -> Result<RecoverResponse, String> {
    let inst = build_instance(req)?;
    let cfg = BootstrapConfig::default();

    let mut estimates = Vec::new();
    let null = estimate_null(&inst.train, N_PERMUTATIONS, derive(req.seed, &[3]))
        .map_err(err_string)?;
    let fit = boats_fit(&inst.train, &inst.select, &null, &cfg.thresholds).map_err(err_string)?;
    estimates.push(estimate_entry(
        "boats",
        &fit.weights,
        fit.multiplier,
        &inst,
    )?);

    for method in [Method::Ridge, Method::Lasso, Method::ElasticNet] {
        let (fit, _) = sweep_select(&inst.train, &inst.select, method, &cfg).map_err(err_string)?;
        estimates.push(estimate_entry(
            method.as_str(),
            &fit.weights,
            fit.meta_parameter,
            &inst,
        )?);
    }

    Ok(RecoverResponse {
        d: inst.d,
        m: inst.m,
        noise_sigma: inst.truth.noise_sigma,
        true_weights: inst.truth.weights.as_slice().to_vec(),
        true_support: inst.truth.support.indices().to_vec(),
        estimates,
    })
}

fn estimate_entry(
    name: &str,
    weights: &boats::WeightVector,
    meta: f64,
    inst: &Instance,
) -> Result<MethodEstimate, String> {
    Ok(MethodEstimate {
        method: name.to_string(),
        weights: weights.as_slice().to_vec(),
        support_size: weights.l0_norm(),
        meta_parameter: meta,
        rms_error: rms_error(weights, &inst.truth.weights).map_err(err_string)?,
        test_r2: r_squared(weights, &inst.test).map_err(err_string)?,
    })
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub multiplier: f64,
    pub select_loss: f64,
    pub support_size: usize,
}

#[derive(Debug, Serialize)]
pub struct CurveResponse {
    pub d: usize,
    pub m: usize,
    pub chosen_multiplier: f64,
    pub chosen_support: Vec<usize>,
    pub true_support: Vec<usize>,
    /// `|beta|` of the unrestricted training fit, per coordinate.
    pub initial_magnitudes: Vec<f64>,
    /// Permutation-null level, per coordinate. A coordinate is dropped at
    /// multiplier `t` when `initial < null * t`.
    pub null_magnitudes: Vec<f64>,
    pub curve: Vec<CurvePoint>,
}

fn threshold_curve_impl(req: &InstanceRequest) -> Result<CurveResponse, String> {
    let inst = build_instance(req)?;
    let grid = ThresholdGrid::default();
    let null = estimate_null(&inst.train, N_PERMUTATIONS, derive(req.seed, &[3]))
        .map_err(err_string)?;
    let fit = boats_fit(&inst.train, &inst.select, &null, &grid).map_err(err_string)?;

    let mut curve = Vec::with_capacity(fit.curve.len());
    for &(multiplier, select_loss) in &fit.curve {
        let (thresholded, _) =
            threshold_weights(&fit.initial_fit.weights, &null, multiplier).map_err(err_string)?;
        curve.push(CurvePoint {
            multiplier,
            select_loss,
            support_size: thresholded.l0_norm(),
        });
    }

    Ok(CurveResponse {
        d: inst.d,
        m: inst.m,
        chosen_multiplier: fit.multiplier,
        chosen_support: fit.support.indices().to_vec(),
        true_support: inst.truth.support.indices().to_vec(),
        initial_magnitudes: fit
            .initial_fit
            .weights
            .as_slice()
            .iter()
            .map(|v| v.abs())
            .collect(),
        null_magnitudes: null.magnitudes().to_vec(),
        curve,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramRequest {
    pub distribution: String,
    pub n_draws: usize,
    pub bins: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct HistogramResponse {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u32>,
    pub n: usize,
    pub mean_abs: f64,
}

fn weight_histogram_impl(req: &HistogramRequest) -> Result<HistogramResponse, String> {
    if req.n_draws == 0 || req.n_draws > MAX_DRAWS {
        return Err(format!("n_draws must be in 1..={MAX_DRAWS}"));
    }
    if req.bins == 0 || req.bins > MAX_BINS {
        return Err(format!("bins must be in 1..={MAX_BINS}"));
    }
    let distribution: WeightDistribution = req.distribution.parse().map_err(err_string)?;
    // A fully dense spec makes every coordinate one draw from the family.
    let spec = ModelSpec {
        distribution,
        k: req.n_draws,
        sparsity: 0.0,
        noise_factor: 0.0,
        seed: req.seed,
        params: Default::default(),
    };
    let truth = draw_weights(&spec).map_err(err_string)?;
    let values = truth.weights.as_slice();

    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / req.bins as f64;
    let mut counts = vec![0u32; req.bins];
    for &v in values {
        let bin = (((v - lo) / width) as usize).min(req.bins - 1);
        counts[bin] += 1;
    }

    Ok(HistogramResponse {
        lo,
        hi,
        counts,
        n: values.len(),
        mean_abs: values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64,
    })
}

fn err_string(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn envelope<T: Serialize>(result: Result<T, String>) -> String {
    let value = match result {
        Ok(v) => serde_json::json!({ "ok": true, "value": v }),
        Err(e) => serde_json::json!({ "ok": false, "error": e }),
    };
    value.to_string()
}

fn parse<'a, T: Deserialize<'a>>(request: &'a str) -> Result<T, String> {
    serde_json::from_str(request).map_err(|e| format!("bad request: {e}"))
}

/// Fits all four methods on one synthetic instance and reports the
/// estimates next to the generating weights.
#[wasm_bindgen]
pub fn recover(request: &str) -> String {
    envelope(parse(request).and_then(|req: InstanceRequest| recover_impl(&req)))
}

/// Runs the threshold sweep on one instance and reports the selection-loss
/// curve, per-coordinate magnitudes, and the chosen support.
#[wasm_bindgen]
pub fn threshold_curve(request: &str) -> String {
    envelope(parse(request).and_then(|req: InstanceRequest| threshold_curve_impl(&req)))
}

/// Histograms draws from one active-coefficient family.
#[wasm_bindgen]
pub fn weight_histogram(request: &str) -> String {
    envelope(parse(request).and_then(|req: HistogramRequest| weight_histogram_impl(&req)))
}
