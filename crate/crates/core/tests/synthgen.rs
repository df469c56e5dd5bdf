mod common;

use boats::synthgen::{
    draw_weights, make_dataset, make_inputs, sample_coefficient, DistributionParams, ModelSpec,
    WeightDistribution,
};

fn spec(distribution: WeightDistribution, k: usize, sparsity: f64, c: f64, seed: u64) -> ModelSpec {
    ModelSpec {
        distribution,
        k,
        sparsity,
        noise_factor: c,
        seed,
        params: DistributionParams::default(),
    }
}

#[test]
fn dimension_follows_the_sparsity_rounding_rule() {
    // d = round(k / (1 - sparsity)).
    assert_eq!(spec(WeightDistribution::Laplace, 100, 2.0 / 3.0, 0.2, 1).dimension().unwrap(), 300);
    assert_eq!(spec(WeightDistribution::Laplace, 100, 0.0, 0.2, 1).dimension().unwrap(), 100);
    assert_eq!(spec(WeightDistribution::Laplace, 20, 0.66, 0.0, 1).dimension().unwrap(), 59);
    assert_eq!(spec(WeightDistribution::Laplace, 20, 0.5, 0.0, 1).dimension().unwrap(), 40);
    assert_eq!(spec(WeightDistribution::Laplace, 3, 0.9, 0.0, 1).dimension().unwrap(), 30);
}

#[test]
fn rejects_invalid_specs() {
    assert!(spec(WeightDistribution::Laplace, 0, 0.5, 0.2, 1).validate().is_err());
    assert!(spec(WeightDistribution::Laplace, 10, 1.0, 0.2, 1).validate().is_err());
    assert!(spec(WeightDistribution::Laplace, 10, -0.1, 0.2, 1).validate().is_err());
    assert!(spec(WeightDistribution::Laplace, 10, 0.5, -0.2, 1).validate().is_err());
    let mut bad = DistributionParams::default();
    bad.symexp_cutoff = -1.0;
    assert!(bad.validate().is_err());
    let mut bad2 = DistributionParams::default();
    bad2.clustered_pos_fraction = 1.5;
    assert!(bad2.validate().is_err());
}

#[test]
fn ground_truth_has_exactly_k_nonzeros_matching_its_support() {
    for (dist, seed) in [
        (WeightDistribution::Laplace, 1u64),
        (WeightDistribution::Uniform, 2),
        (WeightDistribution::SymmetricIncreasingExponential, 3),
        (WeightDistribution::AsymmetricClustered, 4),
    ] {
        let s = spec(dist, 100, 2.0 / 3.0, 0.2, seed);
        let truth = draw_weights(&s).unwrap();
        assert_eq!(truth.weights.dim(), 300);
        assert_eq!(truth.weights.l0_norm(), 100);
        assert_eq!(truth.support.k(), 100);
        assert_eq!(truth.weights.support().indices(), truth.support.indices());
        // 200 exact-zero padding coordinates.
        let zeros = truth.weights.as_slice().iter().filter(|&&v| v == 0.0).count();
        assert_eq!(zeros, 200);
    }
}

#[test]
fn noise_sigma_treats_the_factor_as_a_variance_scale() {
    let s = spec(WeightDistribution::Uniform, 50, 0.5, 0.3, 9);
    let truth = draw_weights(&s).unwrap();
    let mass: f64 = truth.weights.as_slice().iter().map(|v| v.abs()).sum();
    assert!((truth.noise_sigma - (0.3 * mass).sqrt()).abs() < 1e-12);
    let noiseless = draw_weights(&spec(WeightDistribution::Uniform, 50, 0.5, 0.0, 9)).unwrap();
    assert_eq!(noiseless.noise_sigma, 0.0);
}

#[test]
fn uniform_draws_respect_halfwidth_and_dead_zone() {
    let params = DistributionParams::default();
    let mut rng = common::rng(33);
    for _ in 0..5000 {
        let v = sample_coefficient(WeightDistribution::Uniform, &params, &mut rng);
        assert!(v.abs() < 2.0 + 1e-12);
        assert!(v.abs() >= 0.05, "dead zone violated: {v}");
    }
}

#[test]
fn symmetric_exponential_draws_live_on_the_truncated_band() {
    let params = DistributionParams::default();
    let mut rng = common::rng(35);
    let mut positives = 0usize;
    let n = 5000;
    for _ in 0..n {
        let v = sample_coefficient(
            WeightDistribution::SymmetricIncreasingExponential,
            &params,
            &mut rng,
        );
        // |v| = peak − e with e ∈ [0, cutoff]: band [0.1, 2.0].
        assert!((0.1 - 1e-12..=2.0 + 1e-12).contains(&v.abs()), "out of band: {v}");
        if v > 0.0 {
            positives += 1;
        }
    }
    let frac = positives as f64 / n as f64;
    assert!((0.45..0.55).contains(&frac), "sign symmetry broken: {frac}");
}

#[test]
fn clustered_draws_land_in_their_clusters_at_the_right_rate() {
    let params = DistributionParams::default();
    let mut rng = common::rng(37);
    let mut positives = 0usize;
    let n = 5000;
    for _ in 0..n {
        let v = sample_coefficient(WeightDistribution::AsymmetricClustered, &params, &mut rng);
        let near_pos = (v - 2.0).abs() < 0.6;
        let near_neg = (v + 0.8).abs() < 0.6;
        assert!(near_pos || near_neg, "stray value: {v}");
        if near_pos {
            positives += 1;
        }
    }
    let frac = positives as f64 / n as f64;
    assert!((0.67..0.73).contains(&frac), "cluster mix off: {frac}");
}

#[test]
fn laplace_matches_its_analytic_distribution() {
    // Distributional self-test: empirical mean within 3 standard errors,
    // Kolmogorov-Smirnov statistic against the Laplace CDF under 0.02.
    let s = spec(WeightDistribution::Laplace, 10_000, 0.0, 0.0, 41);
    let truth = draw_weights(&s).unwrap();
    let mut draws: Vec<f64> = truth.weights.as_slice().to_vec();
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    // Laplace(0, 1): mean 0, variance 2b² = 2.
    let se = (2.0f64).sqrt() / n.sqrt();
    assert!(mean.abs() < 3.0 * se, "mean {mean} vs SE {se}");

    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cdf = |x: f64| 0.5 + 0.5 * x.signum() * (1.0 - (-x.abs()).exp());
    let mut ks = 0.0f64;
    for (i, &x) in draws.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        ks = ks.max((f - lo).abs()).max((hi - f).abs());
    }
    assert!(ks < 0.02, "KS statistic {ks}");
}

#[test]
fn draws_are_deterministic_per_seed_and_distinct_across_seeds() {
    let a = draw_weights(&spec(WeightDistribution::Laplace, 30, 0.5, 0.2, 77)).unwrap();
    let b = draw_weights(&spec(WeightDistribution::Laplace, 30, 0.5, 0.2, 77)).unwrap();
    let c = draw_weights(&spec(WeightDistribution::Laplace, 30, 0.5, 0.2, 78)).unwrap();
    assert_eq!(a.weights.as_slice(), b.weights.as_slice());
    assert_eq!(a.support.indices(), b.support.indices());
    assert_ne!(a.weights.as_slice(), c.weights.as_slice());
}

#[test]
fn inputs_are_standard_normal_and_seeded() {
    let x = make_inputs(400, 25, 91).unwrap();
    assert_eq!((x.nrows(), x.ncols()), (400, 25));
    let n = (400 * 25) as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 0.02, "mean {mean}");
    assert!((var - 1.0).abs() < 0.03, "variance {var}");
    assert_eq!(x, make_inputs(400, 25, 91).unwrap());
    assert_ne!(x, make_inputs(400, 25, 92).unwrap());
}

#[test]
fn dataset_wires_noise_through_the_truth() {
    let s = spec(WeightDistribution::AsymmetricClustered, 10, 0.5, 0.0, 55);
    let truth = draw_weights(&s).unwrap();
    let data = make_dataset(&truth, 100, 55).unwrap();
    assert_eq!((data.n_samples(), data.n_features()), (100, 20));
    // Noiseless: y = Xβ exactly.
    let manual = data.inputs() * truth.weights.values();
    assert_eq!(data.outputs(), &manual);

    let noisy_spec = spec(WeightDistribution::AsymmetricClustered, 10, 0.5, 0.2, 55);
    let noisy_truth = draw_weights(&noisy_spec).unwrap();
    // Same weight stream: only the noise differs.
    assert_eq!(noisy_truth.weights.as_slice(), truth.weights.as_slice());
    let noisy = make_dataset(&noisy_truth, 100, 55).unwrap();
    assert_eq!(noisy.inputs(), data.inputs(), "input stream must not depend on noise");
    let residual = noisy.outputs() - &manual;
    let sd = (residual.norm_squared() / 100.0).sqrt();
    assert!((residual.abs().max() > 0.0) && (sd / noisy_truth.noise_sigma - 1.0).abs() < 0.35);
}

#[test]
fn sample_ratio_math_reproduces_the_reference_configuration() {
    // sparsity 2/3 with k=100 gives d=300; a sample ratio of 5 means 1500
    // rows. The exact arithmetic the experiment layer relies on.
    let s = spec(WeightDistribution::Laplace, 100, 2.0 / 3.0, 0.2, 5);
    let d = s.dimension().unwrap();
    assert_eq!(d, 300);
    let m = (5.0 * d as f64).round() as usize;
    assert_eq!(m, 1500);
    let truth = draw_weights(&s).unwrap();
    let data = make_dataset(&truth, m, 5).unwrap();
    assert_eq!(data.n_samples(), 1500);
}

#[test]
fn distribution_names_round_trip() {
    use std::str::FromStr;
    for dist in WeightDistribution::ALL {
        assert_eq!(WeightDistribution::from_str(dist.as_str()).unwrap(), dist);
    }
    assert!(WeightDistribution::from_str("gaussian").is_err());
}
