mod common;

use boats::model::{ols_fit, Dataset, WeightVector};
use boats::regularizers::{
    elastic_net_fit, elastic_net_objective, elastic_net_path, kkt_violation, lasso_fit,
    lasso_path, ridge_fit, RegularizerSpec, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use nalgebra::DVector;
use proptest::prelude::*;

fn lasso(data: &Dataset, l1: f64) -> boats::FitResult {
    lasso_fit(data, l1, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap()
}

fn enet(data: &Dataset, l1: f64, l2: f64) -> boats::FitResult {
    elastic_net_fit(data, RegularizerSpec::new(l1, l2).unwrap(), DEFAULT_TOL, DEFAULT_MAX_ITER)
        .unwrap()
}

#[test]
fn ridge_matches_augmented_system_oracle() {
    for seed in 0..50 {
        let (data, _) = common::random_instance(60, 12, 0.4, 2000 + seed);
        for lambda2 in [1e-3, 0.5, 10.0] {
            let fit = ridge_fit(&data, lambda2).unwrap();
            let oracle = common::augmented_ridge(&data, lambda2);
            assert!(
                common::max_abs_diff(fit.weights.values(), &oracle) < 1e-8,
                "seed {seed}, λ₂={lambda2}: ridge disagrees with the QR oracle"
            );
        }
    }
}

#[test]
fn ridge_shrinks_toward_zero_as_penalty_grows() {
    let (data, _) = common::random_instance(60, 8, 0.5, 31);
    let norms: Vec<f64> = [0.01, 1.0, 100.0, 10_000.0]
        .iter()
        .map(|&l| ridge_fit(&data, l).unwrap().weights.values().norm())
        .collect();
    for pair in norms.windows(2) {
        assert!(pair[1] < pair[0]);
    }
    assert!(norms[3] < 0.1, "huge penalty must crush the weights");
    assert!(ridge_fit(&data, 0.0).is_err(), "λ₂=0 is OLS, not ridge");
}

#[test]
fn lasso_matches_soft_threshold_on_orthonormal_designs() {
    for seed in 0..20 {
        let m = 40;
        let d = 6;
        let x = common::orthonormal_design(m, d, 3000 + seed);
        let mut r = common::rng(4000 + seed);
        use rand::Rng;
        let beta = DVector::from_fn(d, |_, _| r.random_range(-2.0..2.0));
        let y = &x * &beta;
        let data = Dataset::new(x, y).unwrap();
        let rho = data.inputs().transpose() * data.outputs();
        for lambda1 in [1e-3, 0.01, 0.05] {
            let fit = lasso(&data, lambda1);
            // XᵀX = I, so the objective separates and each coordinate is
            // soft-thresholded at m·λ₁.
            let threshold = lambda1 * m as f64;
            for j in 0..d {
                let expected = common::soft_threshold(rho[j], threshold);
                let got = fit.weights.get(j).unwrap();
                assert!(
                    (got - expected).abs() < 1e-6,
                    "seed {seed} λ₁={lambda1} coord {j}: {got} vs oracle {expected}"
                );
            }
        }
    }
}

#[test]
fn lasso_and_elastic_net_match_brute_force_grid_on_tiny_instances() {
    for seed in 0..20 {
        let (data, _) = common::random_instance(25, 2, 0.5, 5000 + seed);
        let cases = [(0.05, 0.0), (0.2, 0.0), (0.05, 0.1), (0.3, 0.05)];
        for (l1, l2) in cases {
            let fit = if l2 == 0.0 { lasso(&data, l1) } else { enet(&data, l1, l2) };
            let (grid_beta, grid_obj) = common::grid_search_2d(&data, l1, l2);
            let fit_obj = common::objective_2d(
                &data,
                l1,
                l2,
                fit.weights.get(0).unwrap(),
                fit.weights.get(1).unwrap(),
            );
            // The solver should do no worse than the grid, and the grid pins
            // the minimizer's location to its own resolution.
            assert!(fit_obj <= grid_obj + 1e-9, "seed {seed} ({l1},{l2}): solver lost to the grid");
            assert!(
                common::max_abs_diff(fit.weights.values(), &grid_beta) <= 2e-3,
                "seed {seed} ({l1},{l2}): minimizer far from the grid argmin"
            );
            // And the library's objective agrees with the independent one.
            let lib_obj = elastic_net_objective(&data, &fit.weights, l1, l2).unwrap();
            assert!((lib_obj - fit_obj).abs() < 1e-10);
        }
    }
}

#[test]
fn coordinate_descent_satisfies_kkt_conditions() {
    for seed in 0..10 {
        let (data, _) = common::random_instance(50, 10, 0.8, 6000 + seed);
        for (l1, l2) in [(0.01, 0.0), (0.1, 0.0), (0.05, 0.05), (0.0, 0.2)] {
            let fit = enet(&data, l1, l2);
            assert!(fit.diagnostics.converged);
            let v = kkt_violation(&data, &fit.weights, l1, l2).unwrap();
            assert!(v < 1e-4, "seed {seed} ({l1},{l2}): KKT violation {v}");
        }
    }
}

#[test]
fn objective_history_is_monotone_nonincreasing() {
    for seed in 0..10 {
        let (data, _) = common::random_instance(40, 8, 1.0, 7000 + seed);
        let fit = enet(&data, 0.05, 0.02);
        let h = &fit.diagnostics.objective_history;
        assert!(h.len() >= 2, "history must record the sweeps");
        for pair in h.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "objective rose: {} -> {}", pair[0], pair[1]);
        }
    }
}

#[test]
fn lasso_equals_elastic_net_with_zero_ridge_part_exactly() {
    let (data, _) = common::random_instance(45, 7, 0.6, 81);
    for l1 in [0.01, 0.1, 0.5] {
        let a = lasso(&data, l1);
        let b = enet(&data, l1, 0.0);
        // Identical code path, bitwise identical output.
        assert_eq!(a.weights.as_slice(), b.weights.as_slice());
    }
}

#[test]
fn elastic_net_with_zero_l1_matches_ridge_closed_form() {
    let (data, _) = common::random_instance(50, 6, 0.4, 91);
    let m = data.n_samples() as f64;
    for l2 in [0.01, 0.1, 1.0] {
        let cd = enet(&data, 0.0, l2);
        // The CD objective is (1/2m)RSS + λ₂‖β‖², the closed form minimizes
        // RSS + λ‖β‖²; they coincide at λ = 2mλ₂.
        let closed = ridge_fit(&data, 2.0 * m * l2).unwrap();
        assert!(
            common::max_abs_diff(cd.weights.values(), closed.weights.values()) < 1e-6,
            "λ₂={l2}"
        );
    }
}

#[test]
fn lasso_zeroes_everything_above_the_critical_penalty() {
    let (data, _) = common::random_instance(30, 5, 0.5, 101);
    let m = data.n_samples() as f64;
    let rho = data.inputs().transpose() * data.outputs();
    let critical = rho.abs().max() / m;
    let fit = lasso(&data, critical * 1.0001);
    assert_eq!(fit.weights.l0_norm(), 0, "above λ_max the zero vector is optimal");
    let fit_below = lasso(&data, critical * 0.9);
    assert!(fit_below.weights.l0_norm() > 0);
}

#[test]
fn lasso_support_shrinks_as_penalty_grows() {
    let (data, _) = common::random_instance(60, 10, 0.5, 111);
    let sizes: Vec<usize> = [0.001, 0.01, 0.05, 0.2, 1.0]
        .iter()
        .map(|&l| lasso(&data, l).weights.l0_norm())
        .collect();
    for pair in sizes.windows(2) {
        assert!(pair[1] <= pair[0], "support grew with the penalty: {sizes:?}");
    }
}

#[test]
fn warm_started_paths_match_cold_fits() {
    let (data, _) = common::random_instance(50, 8, 0.7, 121);
    let lambdas = [0.3, 0.01, 0.1, 0.03];
    let path = lasso_path(&data, &lambdas, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    assert_eq!(path.len(), lambdas.len());
    for (i, &l1) in lambdas.iter().enumerate() {
        assert_eq!(path[i].meta_parameter, l1, "results must align with input order");
        let cold = lasso(&data, l1);
        let path_obj = elastic_net_objective(&data, &path[i].weights, l1, 0.0).unwrap();
        let cold_obj = elastic_net_objective(&data, &cold.weights, l1, 0.0).unwrap();
        assert!((path_obj - cold_obj).abs() < 1e-9);
        assert!(common::max_abs_diff(path[i].weights.values(), cold.weights.values()) < 5e-5);
    }

    let specs: Vec<RegularizerSpec> = [(0.2, 0.1), (0.01, 0.005), (0.1, 0.05)]
        .iter()
        .map(|&(a, b)| RegularizerSpec::new(a, b).unwrap())
        .collect();
    let epath = elastic_net_path(&data, &specs, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    for (i, s) in specs.iter().enumerate() {
        let cold = enet(&data, s.lambda1, s.lambda2);
        assert!(
            common::max_abs_diff(epath[i].weights.values(), cold.weights.values()) < 5e-5
        );
    }
}

#[test]
fn rejects_invalid_penalties_and_controls() {
    let (data, _) = common::random_instance(20, 3, 0.5, 131);
    assert!(RegularizerSpec::new(0.0, 0.0).is_err(), "unpenalized spec is OLS");
    assert!(RegularizerSpec::new(-0.1, 0.0).is_err());
    assert!(RegularizerSpec::new(f64::NAN, 0.0).is_err());
    assert!(ridge_fit(&data, -1.0).is_err());
    assert!(lasso_fit(&data, 0.1, 0.0, 100).is_err(), "tol must be positive");
    assert!(lasso_fit(&data, 0.1, 1e-7, 0).is_err(), "budget must be positive");
}

#[test]
fn exhausted_iteration_budget_reports_nonconvergence() {
    let (data, _) = common::random_instance(60, 12, 1.0, 141);
    let fit = lasso_fit(&data, 1e-4, 1e-14, 2).unwrap();
    assert!(!fit.diagnostics.converged);
    assert_eq!(fit.diagnostics.iterations, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cd_objective_never_beats_ols_rss_but_is_valid(seed in 0u64..500) {
        let (data, _) = common::random_instance(30, 4, 0.5, seed);
        let fit = lasso(&data, 0.05);
        let ols = ols_fit(&data, None).unwrap();
        // Penalization can only raise the raw RSS.
        prop_assert!(fit.train_loss + 1e-9 >= ols.train_loss);
        prop_assert!(fit.weights.as_slice().iter().all(|b| b.is_finite()));
    }

    #[test]
    fn kkt_holds_across_random_penalties(seed in 0u64..500, l1 in 1e-3f64..0.5, l2 in 0.0f64..0.5) {
        let (data, _) = common::random_instance(35, 5, 0.7, seed);
        let fit = enet(&data, l1, l2);
        prop_assert!(kkt_violation(&data, &fit.weights, l1, l2).unwrap() < 1e-4);
    }

    #[test]
    fn stronger_l1_never_grows_the_l1_norm(seed in 0u64..500) {
        let (data, _) = common::random_instance(40, 6, 0.5, seed);
        let weak = lasso(&data, 0.01);
        let strong = lasso(&data, 0.3);
        let norm = |w: &WeightVector| w.as_slice().iter().map(|b| b.abs()).sum::<f64>();
        prop_assert!(norm(&strong.weights) <= norm(&weak.weights) + 1e-9);
    }
}
