//! Independent oracles and instance builders shared by the integration
//! tests. Every oracle deliberately takes a different computational route
//! than the library (QR / explicit inverses / brute-force grids vs. the
//! library's SVD, Cholesky, and coordinate descent).
#![allow(dead_code)]

use boats::model::{Dataset, WeightVector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal_matrix(m: usize, d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(m, d, |_, _| StandardNormal.sample(rng))
}

/// Overdetermined instance with i.i.d. N(0,1) design, dense random weights,
/// and optional noise; well conditioned with high probability for m >= 3d.
pub fn random_instance(m: usize, d: usize, noise: f64, seed: u64) -> (Dataset, WeightVector) {
    let mut r = rng(seed);
    let x = standard_normal_matrix(m, d, &mut r);
    let beta = DVector::from_fn(d, |_, _| r.random_range(-2.0..2.0));
    let mut y = &x * &beta;
    if noise > 0.0 {
        for v in y.iter_mut() {
            let e: f64 = StandardNormal.sample(&mut r);
            *v += noise * e;
        }
    }
    let data = Dataset::new(x, y).unwrap();
    (data, WeightVector::from_column(beta).unwrap())
}

/// Least-squares solution by explicit normal equations, (XᵀX)⁻¹Xᵀy.
/// Requires full column rank; independent of the library's SVD route.
pub fn normal_equation_ols(data: &Dataset) -> DVector<f64> {
    let x = data.inputs();
    let gram = x.transpose() * x;
    let inv = gram.try_inverse().expect("oracle instance must be full rank");
    inv * (x.transpose() * data.outputs())
}

/// Ridge solution via the augmented least-squares system [X; √λ₂ I] solved
/// by QR, never forming XᵀX + λ₂I.
pub fn augmented_ridge(data: &Dataset, lambda2: f64) -> DVector<f64> {
    let (m, d) = (data.n_samples(), data.n_features());
    let mut aug = DMatrix::zeros(m + d, d);
    aug.view_mut((0, 0), (m, d)).copy_from(data.inputs());
    let sqrt = lambda2.sqrt();
    for j in 0..d {
        aug[(m + j, j)] = sqrt;
    }
    let mut rhs = DVector::zeros(m + d);
    rhs.rows_mut(0, m).copy_from(data.outputs());
    let qr = aug.qr();
    let q_t_rhs = qr.q().transpose() * rhs;
    qr.r()
        .solve_upper_triangular(&q_t_rhs.rows(0, d).into_owned())
        .expect("augmented system is full rank for λ₂ > 0")
}

/// Design whose columns are exactly orthonormal (Q of a QR decomposition),
/// for the closed-form lasso check.
pub fn orthonormal_design(m: usize, d: usize, seed: u64) -> DMatrix<f64> {
    assert!(m >= d);
    let mut r = rng(seed);
    let a = standard_normal_matrix(m, d, &mut r);
    let q = a.qr().q();
    q.columns(0, d).into_owned()
}

pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// The penalized objective (1/2m)‖y − Xβ‖² + λ₁‖β‖₁ + λ₂‖β‖₂², evaluated
/// directly from the d=2 columns without going through the library.
pub fn objective_2d(data: &Dataset, lambda1: f64, lambda2: f64, b0: f64, b1: f64) -> f64 {
    let x = data.inputs();
    let y = data.outputs();
    let m = data.n_samples();
    let mut rss = 0.0;
    for i in 0..m {
        let r = y[i] - b0 * x[(i, 0)] - b1 * x[(i, 1)];
        rss += r * r;
    }
    rss / (2.0 * m as f64)
        + lambda1 * (b0.abs() + b1.abs())
        + lambda2 * (b0 * b0 + b1 * b1)
}

/// Brute-force minimizer of the d=2 objective: coarse 1e-2 pass over
/// [-3,3]², then a 1e-3 pass in a ±2e-2 window around the coarse argmin.
/// Returns (β, objective).
pub fn grid_search_2d(data: &Dataset, lambda1: f64, lambda2: f64) -> (DVector<f64>, f64) {
    assert_eq!(data.n_features(), 2);
    let scan = |c0: f64, c1: f64, half: f64, step: f64| {
        let n = (2.0 * half / step).round() as i64;
        let mut best = (c0, c1, objective_2d(data, lambda1, lambda2, c0, c1));
        for i in 0..=n {
            let b0 = c0 - half + step * i as f64;
            for j in 0..=n {
                let b1 = c1 - half + step * j as f64;
                let obj = objective_2d(data, lambda1, lambda2, b0, b1);
                if obj < best.2 {
                    best = (b0, b1, obj);
                }
            }
        }
        best
    };
    let coarse = scan(0.0, 0.0, 3.0, 1e-2);
    let fine = scan(coarse.0, coarse.1, 2e-2, 1e-3);
    (DVector::from_vec(vec![fine.0, fine.1]), fine.2)
}

pub fn max_abs_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    assert_eq!(a.len(), b.len());
    (a - b).abs().max()
}
