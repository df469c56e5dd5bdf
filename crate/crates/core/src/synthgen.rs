//! Synthetic sparse-model generators.
//!
//! A model spec names a weight family, the active-coefficient count `k`, the
//! fraction of irrelevant predictors (`sparsity`), and a noise factor. The
//! predictor count follows as `d = round(k / (1 - sparsity))`, inputs are
//! i.i.d. standard normal, and the noise level scales with the total signal:
//! `sigma = sqrt(noise_factor * sum|beta|)`.
//!
//! Every family excludes exact zeros, so a ground truth always has exactly
//! `k` active coefficients and support recovery is well-defined.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{generate_responses, Dataset, Support, WeightVector};
use crate::seed::derive;

/// Weight family for the active coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightDistribution {
    /// Double exponential, scale 1.
    Laplace,
    /// Uniform on (-halfwidth, halfwidth) minus a dead zone around zero.
    Uniform,
    /// Magnitude `peak - e` with `e` exponential truncated below the peak;
    /// density increases toward the peak. Sign is a fair coin.
    SymmetricIncreasingExponential,
    /// Two tight gaussian clusters of opposite sign and unequal share.
    AsymmetricClustered,
}

impl WeightDistribution {
    pub const ALL: [WeightDistribution; 4] = [
        WeightDistribution::Laplace,
        WeightDistribution::Uniform,
        WeightDistribution::SymmetricIncreasingExponential,
        WeightDistribution::AsymmetricClustered,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightDistribution::Laplace => "laplace",
            WeightDistribution::Uniform => "uniform",
            WeightDistribution::SymmetricIncreasingExponential => {
                "symmetric_increasing_exponential"
            }
            WeightDistribution::AsymmetricClustered => "asymmetric_clustered",
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightDistribution::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "distribution",
                    format!(
                        "unknown distribution {s:?}; expected one of laplace, uniform, \
                         symmetric_increasing_exponential, asymmetric_clustered"
                    ),
                )
            })
    }
}

/// Shape parameters for the weight families. The defaults reproduce the
/// standard benchmark models; override through the `[distribution_params]`
/// config section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistributionParams {
    pub laplace_scale: f64,
    pub uniform_halfwidth: f64,
    pub uniform_dead_zone: f64,
    pub symexp_peak: f64,
    pub symexp_rate: f64,
    pub symexp_cutoff: f64,
    pub clustered_pos_mean: f64,
    pub clustered_pos_sd: f64,
    pub clustered_neg_mean: f64,
    pub clustered_neg_sd: f64,
    pub clustered_pos_fraction: f64,
}

impl Default for DistributionParams {
    fn default() -> Self {
        DistributionParams {
            laplace_scale: 1.0,
            uniform_halfwidth: 2.0,
            uniform_dead_zone: 0.05,
            symexp_peak: 2.0,
            symexp_rate: 1.5,
            symexp_cutoff: 1.9,
            clustered_pos_mean: 2.0,
            clustered_pos_sd: 0.1,
            clustered_neg_mean: -0.8,
            clustered_neg_sd: 0.1,
            clustered_pos_fraction: 0.7,
        }
    }
}

impl DistributionParams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("laplace_scale", self.laplace_scale),
            ("uniform_halfwidth", self.uniform_halfwidth),
            ("symexp_peak", self.symexp_peak),
            ("symexp_rate", self.symexp_rate),
            ("clustered_pos_sd", self.clustered_pos_sd),
            ("clustered_neg_sd", self.clustered_neg_sd),
        ];
        for (name, v) in positives {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !self.uniform_dead_zone.is_finite()
            || self.uniform_dead_zone <= 0.0
            || self.uniform_dead_zone >= self.uniform_halfwidth
        {
            return Err(Error::invalid(
                "uniform_dead_zone",
                format!(
                    "must lie in (0, halfwidth), got {} with halfwidth {}",
                    self.uniform_dead_zone, self.uniform_halfwidth
                ),
            ));
        }
        if !self.symexp_cutoff.is_finite()
            || self.symexp_cutoff <= 0.0
            || self.symexp_cutoff >= self.symexp_peak
        {
            return Err(Error::invalid(
                "symexp_cutoff",
                format!(
                    "must lie in (0, peak) so magnitudes stay positive, got {} with peak {}",
                    self.symexp_cutoff, self.symexp_peak
                ),
            ));
        }
        for (name, v) in [
            ("clustered_pos_mean", self.clustered_pos_mean),
            ("clustered_neg_mean", self.clustered_neg_mean),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !self.clustered_pos_fraction.is_finite()
            || !(0.0..=1.0).contains(&self.clustered_pos_fraction)
        {
            return Err(Error::invalid(
                "clustered_pos_fraction",
                format!("must lie in [0, 1], got {}", self.clustered_pos_fraction),
            ));
        }
        Ok(())
    }
}

/// Full description of one synthetic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub distribution: WeightDistribution,
    /// Active coefficients.
    pub k: usize,
    /// Fraction of predictors that are irrelevant, in `[0, 1)`.
    pub sparsity: f64,
    /// Noise scale factor `c` in `sigma = sqrt(c * sum|beta|)`.
    pub noise_factor: f64,
    pub seed: u64,
    #[serde(default)]
    pub params: DistributionParams,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if !self.sparsity.is_finite() || !(0.0..1.0).contains(&self.sparsity) {
            return Err(Error::invalid(
                "sparsity",
                format!("must lie in [0, 1), got {}", self.sparsity),
            ));
        }
        if !self.noise_factor.is_finite() || self.noise_factor < 0.0 {
            return Err(Error::invalid(
                "noise_factor",
                format!("must be finite and nonnegative, got {}", self.noise_factor),
            ));
        }
        self.params.validate()
    }

    /// Total predictor count `d = round(k / (1 - sparsity))`; always `>= k`.
    pub fn dimension(&self) -> Result<usize> {
        self.validate()?;
        Ok((self.k as f64 / (1.0 - self.sparsity)).round() as usize)
    }
}

/// The weights a synthetic dataset was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub weights: WeightVector,
    pub support: Support,
    /// Response noise standard deviation implied by the model spec.
    pub noise_sigma: f64,
}

/// One draw from an active-coefficient family. Rejection loops guarantee the
/// result is finite and never exactly zero.
pub fn sample_coefficient(
    distribution: WeightDistribution,
    params: &DistributionParams,
    rng: &mut impl Rng,
) -> f64 {
    loop {
        let v = match distribution {
            WeightDistribution::Laplace => {
                let u: f64 = rng.random_range(0.0..1.0) - 0.5;
                -params.laplace_scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            WeightDistribution::Uniform => {
                let hw = params.uniform_halfwidth;
                let v = rng.random_range(-hw..hw);
                if v.abs() < params.uniform_dead_zone {
                    continue;
                }
                v
            }
            WeightDistribution::SymmetricIncreasingExponential => {
                let exp = Exp::new(params.symexp_rate).expect("validated rate");
                let e = loop {
                    let e: f64 = exp.sample(rng);
                    if e <= params.symexp_cutoff {
                        break e;
                    }
                };
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * (params.symexp_peak - e)
            }
            WeightDistribution::AsymmetricClustered => {
                let positive = rng.random_range(0.0..1.0) < params.clustered_pos_fraction;
                let (mean, sd) = if positive {
                    (params.clustered_pos_mean, params.clustered_pos_sd)
                } else {
                    (params.clustered_neg_mean, params.clustered_neg_sd)
                };
                Normal::new(mean, sd).expect("validated sd").sample(rng)
            }
        };
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
}

/// Draws the ground-truth weights for a spec: support positions first, then
/// active values in support order, from the stream `derive(spec.seed, [0])`.
pub fn draw_weights(spec: &ModelSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let d = spec.dimension()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive(spec.seed, &[0]));

    let mut positions = rand::seq::index::sample(&mut rng, d, spec.k).into_vec();
    positions.sort_unstable();
    let support = Support::new(positions, d)?;

    let mut values = vec![0.0; d];
    for &j in support.indices() {
        values[j] = sample_coefficient(spec.distribution, &spec.params, &mut rng);
    }
    let weights = WeightVector::new(values)?;

    let signal: f64 = weights.as_slice().iter().map(|b| b.abs()).sum();
    let noise_sigma = (spec.noise_factor * signal).sqrt();
    Ok(GroundTruth {
        weights,
        support,
        noise_sigma,
    })
}

/// `m x d` matrix of i.i.d. standard normal inputs, filled row-major from
/// the stream `derive(seed, [1])`.
pub fn make_inputs(m: usize, d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if m == 0 || d == 0 {
        return Err(Error::invalid(
            "inputs",
            format!("need at least one sample and one predictor, got {m}x{d}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, &[1]));
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut inputs = DMatrix::zeros(m, d);
    for i in 0..m {
        for j in 0..d {
            inputs[(i, j)] = normal.sample(&mut rng);
        }
    }
    Ok(inputs)
}

/// Assembles a dataset for a ground truth: fresh inputs, then responses with
/// the truth's noise level. Input and noise streams are separate, so the
/// same seed with a different noise factor sees identical inputs.
pub fn make_dataset(truth: &GroundTruth, m: usize, seed: u64) -> Result<Dataset> {
    let d = truth.weights.dim();
    let inputs = make_inputs(m, d, seed)?;
    let outputs = generate_responses(&truth.weights, &inputs, truth.noise_sigma, derive(seed, &[2]))?;
    Dataset::new(inputs, outputs)
}
