//! Core linear-model types and ordinary least squares.
//!
//! Everything downstream (penalized baselines, thresholded refits, the
//! benchmark harness) moves through `Dataset`, `WeightVector`, and
//! `FitResult`. Models have no intercept: synthetic inputs are mean-zero by
//! construction and external data is expected centered.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Fitting routines selectable throughout the crate and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ols,
    Ridge,
    Lasso,
    ElasticNet,
    Boats,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ols,
        Method::Ridge,
        Method::Lasso,
        Method::ElasticNet,
        Method::Boats,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ols => "ols",
            Method::Ridge => "ridge",
            Method::Lasso => "lasso",
            Method::ElasticNet => "elastic_net",
            Method::Boats => "boats",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "method",
                    format!("unknown method {s:?}; expected one of ols, ridge, lasso, elastic_net, boats"),
                )
            })
    }
}

fn check_finite<'a>(values: impl Iterator<Item = &'a f64>, context: &'static str) -> Result<()> {
    for (index, v) in values.enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { context, index });
        }
    }
    Ok(())
}

/// Dense coefficient vector over `d` predictors. Entries are finite; an
/// entry is "off" only when it is exactly 0.0, so support counts are never
/// tolerance-dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: DVector<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_column(DVector::from_vec(values))
    }

    pub fn from_column(values: DVector<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("weights", "dimension must be at least 1"));
        }
        check_finite(values.iter(), "weights")?;
        Ok(WeightVector { values })
    }

    /// All-zero vector of dimension `d` (`d >= 1`).
    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "weight dimension must be at least 1");
        WeightVector {
            values: DVector::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn get(&self, j: usize) -> Option<f64> {
        self.values.as_slice().get(j).copied()
    }

    /// Count of exactly nonzero entries.
    pub fn l0_norm(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn support(&self) -> Support {
        Support {
            indices: self
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, _)| j)
                .collect(),
        }
    }
}

/// Sorted set of active predictor indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    indices: Vec<usize>,
}

impl Support {
    /// Builds a support over `d` predictors; indices are sorted, must be
    /// unique and in `[0, d)`.
    pub fn new(mut indices: Vec<usize>, d: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid("support", format!("duplicate index {}", w[0])));
        }
        if let Some(&last) = indices.last() {
            if last >= d {
                return Err(Error::invalid(
                    "support",
                    format!("index {last} out of range for dimension {d}"),
                ));
            }
        }
        Ok(Support { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of active predictors.
    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }
}

/// Input matrix (`m` samples by `d` predictors) with aligned responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: DMatrix<f64>,
    outputs: DVector<f64>,
}

impl Dataset {
    pub fn new(inputs: DMatrix<f64>, outputs: DVector<f64>) -> Result<Self> {
        if inputs.nrows() == 0 || inputs.ncols() == 0 {
            return Err(Error::invalid(
                "dataset",
                format!("need at least one sample and one predictor, got {}x{}", inputs.nrows(), inputs.ncols()),
            ));
        }
        if outputs.len() != inputs.nrows() {
            return Err(Error::DimensionMismatch {
                context: "dataset outputs",
                expected: inputs.nrows(),
                found: outputs.len(),
                unit: "responses",
            });
        }
        check_finite(inputs.iter(), "dataset inputs")?;
        check_finite(outputs.iter(), "dataset outputs")?;
        Ok(Dataset { inputs, outputs })
    }

    pub fn n_samples(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn inputs(&self) -> &DMatrix<f64> {
        &self.inputs
    }

    pub fn outputs(&self) -> &DVector<f64> {
        &self.outputs
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::invalid("subset", "row selection is empty"));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_samples()) {
            return Err(Error::invalid(
                "subset",
                format!("row {bad} out of range for {} samples", self.n_samples()),
            ));
        }
        Ok(Dataset {
            inputs: self.inputs.select_rows(rows.iter()),
            outputs: self.outputs.select_rows(rows.iter()),
        })
    }
}

/// Convergence bookkeeping attached to every fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    /// False only when an iterative solver hit its sweep budget.
    pub converged: bool,
    /// Full sweeps performed by an iterative solver; 0 for closed forms.
    pub iterations: usize,
    /// Set when a least-squares subproblem had column rank below the number
    /// of columns it was solved over (minimum-norm solution returned).
    pub rank_deficient: bool,
    /// Objective value after each sweep, for iterative solvers.
    pub objective_history: Vec<f64>,
}

impl FitDiagnostics {
    pub(crate) fn direct(rank_deficient: bool) -> Self {
        FitDiagnostics {
            converged: true,
            iterations: 0,
            rank_deficient,
            objective_history: Vec::new(),
        }
    }
}

/// A fitted weight vector plus the context needed to compare fits.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub weights: WeightVector,
    /// The regularization strength (or threshold multiplier) that produced
    /// this fit; 0.0 for plain least squares.
    pub meta_parameter: f64,
    pub method: Method,
    /// Residual sum of squares on the data the fit was computed from.
    pub train_loss: f64,
    pub diagnostics: FitDiagnostics,
}

/// `X * beta`. The predictor count of `inputs` must match the weights.
pub fn predict(weights: &WeightVector, inputs: &DMatrix<f64>) -> Result<DVector<f64>> {
    if inputs.ncols() != weights.dim() {
        return Err(Error::DimensionMismatch {
            context: "predict",
            expected: weights.dim(),
            found: inputs.ncols(),
            unit: "predictors",
        });
    }
    Ok(inputs * weights.values())
}

/// Residual sum of squares `||y - X beta||^2`.
pub fn least_squares_loss(weights: &WeightVector, data: &Dataset) -> Result<f64> {
    let fitted = predict(weights, data.inputs())?;
    Ok((data.outputs() - fitted).norm_squared())
}

/// Ordinary least squares, optionally restricted to a support.
///
/// Off-support coefficients are exactly zero. Rank-deficient systems (always
/// the case when the support is wider than the sample count) get the
/// minimum-norm solution and are flagged in the diagnostics. An empty
/// support yields the all-zero fit.
pub fn ols_fit(data: &Dataset, support: Option<&Support>) -> Result<FitResult> {
    let d = data.n_features();
    if let Some(s) = support {
        if let Some(&last) = s.indices().last() {
            if last >= d {
                return Err(Error::invalid(
                    "support",
                    format!("index {last} out of range for dimension {d}"),
                ));
            }
        }
    }

    let full = Support::new((0..d).collect(), d).expect("full support is valid");
    let active = support.unwrap_or(&full);

    let mut weights = WeightVector::zeros(d);
    let rank_deficient;
    if active.is_empty() {
        rank_deficient = false;
    } else {
        let x = data.inputs().select_columns(active.indices().iter());
        let svd = x.svd(true, true);
        let max_sv = svd.singular_values.max();
        let eps = max_sv * f64::EPSILON * data.n_samples().max(active.k()) as f64;
        let rank = svd.rank(eps);
        rank_deficient = rank < active.k();
        let solution = svd
            .solve(data.outputs(), eps)
            .map_err(|e| Error::Degenerate(format!("least-squares solve failed: {e}")))?;
        for (pos, &j) in active.indices().iter().enumerate() {
            weights.values[j] = solution[pos];
        }
        check_finite(weights.values.iter(), "ols solution")?;
    }

    let train_loss = least_squares_loss(&weights, data)?;
    Ok(FitResult {
        weights,
        meta_parameter: 0.0,
        method: Method::Ols,
        train_loss,
        diagnostics: FitDiagnostics::direct(rank_deficient),
    })
}

/// Draws `y = X beta + noise` with i.i.d. mean-zero gaussian noise of
/// standard deviation `noise_sigma`. A zero sigma returns exactly `X beta`
/// without touching the generator, so noiseless datasets are reproducible
/// bit for bit regardless of seed.
pub fn generate_responses(
    weights: &WeightVector,
    inputs: &DMatrix<f64>,
    noise_sigma: f64,
    seed: u64,
) -> Result<DVector<f64>> {
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::invalid(
            "noise_sigma",
            format!("must be finite and nonnegative, got {noise_sigma}"),
        ));
    }
    let mut y = predict(weights, inputs)?;
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma)
            .map_err(|e| Error::invalid("noise_sigma", e.to_string()))?;
        for v in y.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(y)
}
