//! Bootstrapped adaptive threshold selection.
//!
//! The estimator works in three moves. First, fit unrestricted least squares
//! on the training split. Second, zero every coefficient whose magnitude
//! falls below a per-coordinate null level scaled by a multiplier; the null
//! level is what least squares produces on this design when the responses
//! carry no signal, estimated by refitting against permuted responses.
//! Third, refit least squares on the surviving support and score it on the
//! selection split. Sweeping the multiplier over a fixed grid and keeping
//! the first minimum of the selection loss picks the model.

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{least_squares_loss, ols_fit, Dataset, FitResult, Support, WeightVector};
use crate::parallel;
use crate::seed;
use crate::util::geomspace;

/// Multiplier grid for the threshold sweep: 0 first (no thresholding), then
/// strictly increasing positive values.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    multipliers: Vec<f64>,
}

impl ThresholdGrid {
    pub fn new(multipliers: Vec<f64>) -> Result<Self> {
        if multipliers.first() != Some(&0.0) {
            return Err(Error::invalid(
                "threshold grid",
                "first multiplier must be 0 so the unthresholded model is always a candidate",
            ));
        }
        if multipliers.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("threshold grid", "multipliers must be finite"));
        }
        if multipliers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "threshold grid",
                "multipliers must be strictly increasing",
            ));
        }
        Ok(ThresholdGrid { multipliers })
    }

    /// `{0}` followed by `points` geometrically spaced multipliers over
    /// `[min, max]`.
    pub fn geometric(min: f64, max: f64, points: usize) -> Result<Self> {
        let mut multipliers = vec![0.0];
        multipliers.extend(geomspace(min, max, points)?);
        ThresholdGrid::new(multipliers)
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }
}

impl Default for ThresholdGrid {
    /// `{0}` plus 40 geometric points over `[0.25, 32]`: dense where the
    /// interesting thresholds live, with enough headroom to shrink any
    /// overfit model to empty.
    fn default() -> Self {
        ThresholdGrid::geometric(0.25, 32.0, 40).expect("default grid parameters are valid")
    }
}

/// How a null profile was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullSource {
    /// Mean absolute least-squares coefficient over response permutations.
    Permutation { n_permutations: usize, seed: u64 },
    /// Closed-form fallback from the response moments alone.
    Moment,
}

/// Per-coordinate null magnitudes: the coefficient size least squares
/// produces on this design when responses carry no signal.
#[derive(Debug, Clone, PartialEq)]
pub struct NullWeightProfile {
    magnitudes: DVector<f64>,
    source: NullSource,
    rank_deficient_fits: usize,
}

impl NullWeightProfile {
    /// Builds a profile from precomputed magnitudes (finite, nonnegative).
    pub fn from_magnitudes(magnitudes: Vec<f64>, source: NullSource) -> Result<Self> {
        if magnitudes.is_empty() {
            return Err(Error::invalid("null profile", "dimension must be at least 1"));
        }
        if let Some((j, &v)) = magnitudes
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(
                "null profile",
                format!("magnitude {v} at index {j} is not a finite nonnegative value"),
            ));
        }
        Ok(NullWeightProfile {
            magnitudes: DVector::from_vec(magnitudes),
            source,
            rank_deficient_fits: 0,
        })
    }

    pub fn magnitudes(&self) -> &[f64] {
        self.magnitudes.as_slice()
    }

    pub fn dim(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn source(&self) -> NullSource {
        self.source
    }

    /// How many permutation fits were rank-deficient (and therefore solved
    /// in the minimum-norm sense). Always 0 for moment profiles.
    pub fn rank_deficient_fits(&self) -> usize {
        self.rank_deficient_fits
    }
}

/// Permutation null: refit least squares against `n_permutations` random
/// reorderings of the responses and average the absolute coefficients
/// per coordinate. Permutation `p` draws from a stream derived as
/// `derive(seed, [p])`, so profiles are reproducible and independent of
/// worker count.
pub fn estimate_null(
    data: &Dataset,
    n_permutations: usize,
    seed_value: u64,
) -> Result<NullWeightProfile> {
    if n_permutations == 0 {
        return Err(Error::invalid("n_permutations", "must be at least 1"));
    }

    let fits: Vec<Result<(DVector<f64>, bool)>> = parallel::map_indexed(n_permutations, |p| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed_value, &[p as u64]));
        let mut order: Vec<usize> = (0..data.n_samples()).collect();
        order.shuffle(&mut rng);
        let permuted = Dataset::new(
            data.inputs().clone(),
            data.outputs().select_rows(order.iter()),
        )?;
        let fit = ols_fit(&permuted, None)?;
        Ok((
            fit.weights.values().abs(),
            fit.diagnostics.rank_deficient,
        ))
    });

    let mut sum = DVector::zeros(data.n_features());
    let mut rank_deficient_fits = 0;
    for fit in fits {
        let (magnitudes, deficient) = fit?;
        sum += magnitudes;
        rank_deficient_fits += usize::from(deficient);
    }
    Ok(NullWeightProfile {
        magnitudes: sum / n_permutations as f64,
        source: NullSource::Permutation {
            n_permutations,
            seed: seed_value,
        },
        rank_deficient_fits,
    })
}

/// Moment null: one shared level `(|mean(y)| + var(y)) / d` for every
/// coordinate, with the unbiased variance. A cheap stand-in for the
/// permutation null when refitting is too expensive.
pub fn moment_null(data: &Dataset) -> Result<NullWeightProfile> {
    let m = data.n_samples();
    if m < 2 {
        return Err(Error::invalid(
            "moment null",
            "needs at least 2 samples for the unbiased variance",
        ));
    }
    let y = data.outputs();
    let mean = y.sum() / m as f64;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
    let level = (mean.abs() + var) / data.n_features() as f64;
    Ok(NullWeightProfile {
        magnitudes: DVector::from_element(data.n_features(), level),
        source: NullSource::Moment,
        rank_deficient_fits: 0,
    })
}

/// Zeroes every coefficient with `|beta_j| < null_j * multiplier`; exact
/// equality survives. Returns the thresholded vector and how many nonzero
/// coefficients were removed.
pub fn threshold_weights(
    initial: &WeightVector,
    null: &NullWeightProfile,
    multiplier: f64,
) -> Result<(WeightVector, usize)> {
    if !multiplier.is_finite() || multiplier < 0.0 {
        return Err(Error::invalid(
            "multiplier",
            format!("must be finite and nonnegative, got {multiplier}"),
        ));
    }
    if initial.dim() != null.dim() {
        return Err(Error::DimensionMismatch {
            context: "threshold",
            expected: initial.dim(),
            found: null.dim(),
            unit: "null magnitudes",
        });
    }
    let mut values = initial.values().clone();
    let mut n_zeroed = 0;
    for (j, v) in values.iter_mut().enumerate() {
        if *v != 0.0 && v.abs() < null.magnitudes[j] * multiplier {
            *v = 0.0;
            n_zeroed += 1;
        }
    }
    Ok((WeightVector::from_column(values)?, n_zeroed))
}

/// One full threshold-selection fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BoatsResult {
    /// Least-squares refit on the surviving support, training split.
    pub weights: WeightVector,
    /// Chosen multiplier: first minimum of the selection loss over the grid.
    pub multiplier: f64,
    /// Selection-split residual sum of squares at the chosen multiplier.
    pub select_loss: f64,
    /// Coefficients removed by the chosen threshold.
    pub n_zeroed: usize,
    pub support: Support,
    /// `(multiplier, selection loss)` for every grid point, in grid order.
    pub curve: Vec<(f64, f64)>,
    /// The unrestricted least-squares fit the thresholds were applied to.
    pub initial_fit: FitResult,
}

/// Sweeps the threshold grid: threshold the unrestricted training fit, refit
/// on the surviving support, score on the selection split, keep the first
/// minimum. Consecutive multipliers yielding the same support share one
/// refit, which supports make nested as the multiplier grows.
pub fn boats_fit(
    train: &Dataset,
    select: &Dataset,
    null: &NullWeightProfile,
    grid: &ThresholdGrid,
) -> Result<BoatsResult> {
    if train.n_features() != select.n_features() {
        return Err(Error::DimensionMismatch {
            context: "boats selection split",
            expected: train.n_features(),
            found: select.n_features(),
            unit: "predictors",
        });
    }
    if null.dim() != train.n_features() {
        return Err(Error::DimensionMismatch {
            context: "boats null profile",
            expected: train.n_features(),
            found: null.dim(),
            unit: "null magnitudes",
        });
    }

    let initial_fit = ols_fit(train, None)?;

    let mut curve = Vec::with_capacity(grid.multipliers().len());
    let mut best: Option<(f64, f64, usize, FitResult)> = None;
    let mut last: Option<(Support, usize, FitResult, f64)> = None;

    for &multiplier in grid.multipliers() {
        let (thresholded, n_zeroed) = threshold_weights(&initial_fit.weights, null, multiplier)?;
        let support = thresholded.support();

        let reusable = matches!(&last, Some((s, ..)) if *s == support);
        if !reusable {
            let refit = ols_fit(train, Some(&support))?;
            let loss = least_squares_loss(&refit.weights, select)?;
            last = Some((support, n_zeroed, refit, loss));
        }
        let (_, n_zeroed, refit, loss) = last.as_ref().expect("refit recorded");

        curve.push((multiplier, *loss));
        let improves = match &best {
            None => true,
            Some((_, best_loss, _, _)) => *loss < *best_loss,
        };
        if improves {
            best = Some((multiplier, *loss, *n_zeroed, refit.clone()));
        }
    }

    let (multiplier, select_loss, n_zeroed, refit) = best.expect("grid is never empty");
    Ok(BoatsResult {
        support: refit.weights.support(),
        weights: refit.weights,
        multiplier,
        select_loss,
        n_zeroed,
        curve,
        initial_fit,
    })
}
