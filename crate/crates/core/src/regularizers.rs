//! Penalized least-squares baselines.
//!
//! Ridge solves its closed form `(X'X + lambda2 I)^-1 X'y`. Lasso and
//! elastic net share one cyclic coordinate-descent engine minimizing
//!
//! ```text
//! f(beta) = (1/2m) ||y - X beta||^2 + lambda1 ||beta||_1 + lambda2 ||beta||_2^2
//! ```
//!
//! The sample-size normalization keeps useful lambda ranges comparable
//! across dataset sizes; ridge keeps the un-normalized convention its closed
//! form is always written in. `elastic_net_fit` with `lambda2 = 0` equals
//! `lasso_fit` exactly (same engine, same scale), and with `lambda1 = 0` it
//! matches `ridge_fit(2 m lambda2)` up to solver tolerance.

use nalgebra::{Cholesky, DVector};

use crate::error::{Error, Result};
use crate::model::{least_squares_loss, Dataset, FitDiagnostics, FitResult, Method, WeightVector};

/// Coordinate-descent stop threshold: largest single-coefficient change in
/// one full sweep.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Coordinate-descent sweep budget.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Elastic-net penalty strengths. At least one must be positive; a doubly
/// zero spec is plain least squares and belongs to `ols_fit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerSpec {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl RegularizerSpec {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and nonnegative, got {v}"),
                ));
            }
        }
        if lambda1 == 0.0 && lambda2 == 0.0 {
            return Err(Error::invalid(
                "regularizer",
                "lambda1 and lambda2 are both zero; use ols_fit for unpenalized least squares",
            ));
        }
        Ok(RegularizerSpec { lambda1, lambda2 })
    }
}

fn check_penalty(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::invalid(
            name,
            format!("must be finite and nonnegative, got {value}"),
        ));
    }
    Ok(())
}

fn check_cd_controls(tol: f64, max_iter: usize) -> Result<()> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be at least 1"));
    }
    Ok(())
}

/// Closed-form ridge regression. `lambda2` must be positive: the penalty is
/// what guarantees the normal-equation matrix is invertible.
pub fn ridge_fit(data: &Dataset, lambda2: f64) -> Result<FitResult> {
    check_penalty("lambda2", lambda2)?;
    if lambda2 == 0.0 {
        return Err(Error::invalid(
            "lambda2",
            "must be positive for ridge; use ols_fit for unpenalized least squares",
        ));
    }
    let x = data.inputs();
    let xt = x.transpose();
    let mut gram = &xt * x;
    for j in 0..gram.nrows() {
        gram[(j, j)] += lambda2;
    }
    let chol = Cholesky::new(gram).ok_or_else(|| {
        Error::Degenerate("ridge normal equations are not positive definite".into())
    })?;
    let weights = WeightVector::from_column(chol.solve(&(&xt * data.outputs())))?;
    let train_loss = least_squares_loss(&weights, data)?;
    Ok(FitResult {
        weights,
        meta_parameter: lambda2,
        method: Method::Ridge,
        train_loss,
        diagnostics: FitDiagnostics::direct(false),
    })
}

/// The penalized objective the coordinate-descent solvers minimize.
pub fn elastic_net_objective(
    data: &Dataset,
    weights: &WeightVector,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64> {
    check_penalty("lambda1", lambda1)?;
    check_penalty("lambda2", lambda2)?;
    let m = data.n_samples() as f64;
    let rss = least_squares_loss(weights, data)?;
    let l1: f64 = weights.as_slice().iter().map(|b| b.abs()).sum();
    let l2: f64 = weights.as_slice().iter().map(|b| b * b).sum();
    Ok(rss / (2.0 * m) + lambda1 * l1 + lambda2 * l2)
}

/// Maximum violation of the subgradient optimality conditions of the
/// elastic-net objective at `weights`. Zero (up to solver tolerance) at a
/// true minimizer.
pub fn kkt_violation(
    data: &Dataset,
    weights: &WeightVector,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64> {
    check_penalty("lambda1", lambda1)?;
    check_penalty("lambda2", lambda2)?;
    let m = data.n_samples() as f64;
    let residual = data.outputs() - crate::model::predict(weights, data.inputs())?;
    let mut worst = 0.0f64;
    for j in 0..data.n_features() {
        let b = weights.as_slice()[j];
        let grad = -data.inputs().column(j).dot(&residual) / m + 2.0 * lambda2 * b;
        let violation = if b > 0.0 {
            (grad + lambda1).abs()
        } else if b < 0.0 {
            (grad - lambda1).abs()
        } else {
            (grad.abs() - lambda1).max(0.0)
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}

fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Cyclic coordinate descent over the elastic-net objective. Returns the
/// solution plus per-sweep objective history; hitting the sweep budget
/// clears `converged` but is not an error.
fn coordinate_descent(
    data: &Dataset,
    lambda1: f64,
    lambda2: f64,
    tol: f64,
    max_iter: usize,
    init: Option<&WeightVector>,
) -> Result<(WeightVector, FitDiagnostics)> {
    let m = data.n_samples() as f64;
    let d = data.n_features();
    let x = data.inputs();

    let mut beta: DVector<f64> = match init {
        Some(w) => {
            if w.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "warm start",
                    expected: d,
                    found: w.dim(),
                    unit: "predictors",
                });
            }
            w.values().clone()
        }
        None => DVector::zeros(d),
    };

    let col_sq: Vec<f64> = (0..d).map(|j| x.column(j).norm_squared()).collect();
    let mut residual = data.outputs() - x * &beta;

    let mut history = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_iter {
        sweeps += 1;
        let mut max_delta = 0.0f64;
        for j in 0..d {
            let denom = col_sq[j] / m + 2.0 * lambda2;
            let old = beta[j];
            let new = if denom == 0.0 {
                // Zero column with no ridge term: coefficient is irrelevant
                // to the loss, pin it to zero.
                0.0
            } else {
                let rho = x.column(j).dot(&residual) + col_sq[j] * old;
                soft_threshold(rho / m, lambda1) / denom
            };
            if new != old {
                residual.axpy(old - new, &x.column(j), 1.0);
                beta[j] = new;
                max_delta = max_delta.max((new - old).abs());
            }
        }
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        let l2: f64 = beta.iter().map(|b| b * b).sum();
        history.push(residual.norm_squared() / (2.0 * m) + lambda1 * l1 + lambda2 * l2);
        if max_delta < tol {
            converged = true;
            break;
        }
    }

    let weights = WeightVector::from_column(beta)?;
    Ok((
        weights,
        FitDiagnostics {
            converged,
            iterations: sweeps,
            rank_deficient: false,
            objective_history: history,
        },
    ))
}

fn cd_fit(
    data: &Dataset,
    lambda1: f64,
    lambda2: f64,
    method: Method,
    meta: f64,
    tol: f64,
    max_iter: usize,
    init: Option<&WeightVector>,
) -> Result<FitResult> {
    let (weights, diagnostics) = coordinate_descent(data, lambda1, lambda2, tol, max_iter, init)?;
    let train_loss = least_squares_loss(&weights, data)?;
    Ok(FitResult {
        weights,
        meta_parameter: meta,
        method,
        train_loss,
        diagnostics,
    })
}

/// L1-penalized least squares; `lambda1` must be positive.
pub fn lasso_fit(data: &Dataset, lambda1: f64, tol: f64, max_iter: usize) -> Result<FitResult> {
    check_cd_controls(tol, max_iter)?;
    let spec = RegularizerSpec::new(lambda1, 0.0)?;
    cd_fit(data, spec.lambda1, 0.0, Method::Lasso, lambda1, tol, max_iter, None)
}

/// Elastic net under `spec`; at least one penalty must be positive.
pub fn elastic_net_fit(
    data: &Dataset,
    spec: RegularizerSpec,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    check_cd_controls(tol, max_iter)?;
    let spec = RegularizerSpec::new(spec.lambda1, spec.lambda2)?;
    cd_fit(
        data,
        spec.lambda1,
        spec.lambda2,
        Method::ElasticNet,
        spec.lambda1 + spec.lambda2,
        tol,
        max_iter,
        None,
    )
}

/// Lasso fits for every lambda in `lambdas`, computed in descending-lambda
/// order with warm starts and returned aligned with the input order.
pub fn lasso_path(
    data: &Dataset,
    lambdas: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<FitResult>> {
    let specs: Vec<RegularizerSpec> = lambdas
        .iter()
        .map(|&l| RegularizerSpec::new(l, 0.0))
        .collect::<Result<_>>()?;
    path_impl(data, &specs, Method::Lasso, tol, max_iter)
}

/// Elastic-net fits for every spec, warm-started from strongest to weakest
/// total penalty and returned aligned with the input order.
pub fn elastic_net_path(
    data: &Dataset,
    specs: &[RegularizerSpec],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<FitResult>> {
    let specs: Vec<RegularizerSpec> = specs
        .iter()
        .map(|s| RegularizerSpec::new(s.lambda1, s.lambda2))
        .collect::<Result<_>>()?;
    path_impl(data, &specs, Method::ElasticNet, tol, max_iter)
}

fn path_impl(
    data: &Dataset,
    specs: &[RegularizerSpec],
    method: Method,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<FitResult>> {
    check_cd_controls(tol, max_iter)?;
    let mut order: Vec<usize> = (0..specs.len()).collect();
    // Strongest penalty first: its solution is sparse and cheap, and each
    // successive fit starts from the previous solution.
    order.sort_by(|&a, &b| {
        let ka = specs[a].lambda1 + specs[a].lambda2;
        let kb = specs[b].lambda1 + specs[b].lambda2;
        kb.partial_cmp(&ka).expect("penalties are finite")
    });

    let mut results: Vec<Option<FitResult>> = vec![None; specs.len()];
    let mut warm: Option<WeightVector> = None;
    for &i in &order {
        let spec = specs[i];
        let meta = match method {
            Method::Lasso => spec.lambda1,
            _ => spec.lambda1 + spec.lambda2,
        };
        let (weights, diagnostics) =
            coordinate_descent(data, spec.lambda1, spec.lambda2, tol, max_iter, warm.as_ref())?;
        let train_loss = least_squares_loss(&weights, data)?;
        warm = Some(weights.clone());
        results[i] = Some(FitResult {
            weights,
            meta_parameter: meta,
            method,
            train_loss,
            diagnostics,
        });
    }
    Ok(results.into_iter().map(|r| r.expect("every spec fitted")).collect())
}
