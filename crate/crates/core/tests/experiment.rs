mod common;

use boats::experiment::{
    load_config, preset, preset_names, preset_toml, read_results, run_benchmark, write_results,
    BenchmarkConfig, CellKey, SCHEMA_VERSION,
};
use boats::model::Method;
use boats::synthgen::WeightDistribution;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

fn tiny_config_toml(k: usize, iterations: usize, seed: u64) -> String {
    format!(
        r#"
k = {k}
iterations = {iterations}
master_seed = {seed}
n_permutations = 10
methods = ["ridge", "boats"]

[[grid]]
distributions = ["laplace", "uniform"]
sparsities = [0.5]
sample_ratios = [4.0]
noise_factors = [0.1]
"#
    )
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn config_round_trips_through_toml() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &tiny_config_toml(8, 4, 7));
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.k, 8);
    assert_eq!(cfg.iterations, 4);
    assert_eq!(cfg.master_seed, 7);
    assert_eq!(cfg.methods, vec![Method::Ridge, Method::Boats]);
    assert_eq!(cfg.tasks().len(), 4, "2 cells × 2 methods");
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let with_typo = tiny_config_toml(8, 4, 7).replace("n_permutations", "n_permutation");
    let err = load_config(&write_config(dir.path(), &with_typo)).unwrap_err();
    assert!(err.to_string().contains("config"), "unknown key must fail loudly: {err}");

    let dup_methods = tiny_config_toml(8, 4, 7).replace(
        r#"["ridge", "boats"]"#,
        r#"["ridge", "ridge"]"#,
    );
    assert!(load_config(&write_config(dir.path(), &dup_methods)).is_err());

    let no_grid = tiny_config_toml(8, 4, 7).replace("[[grid]]", "[[grids]]");
    assert!(load_config(&write_config(dir.path(), &no_grid)).is_err());

    assert!(load_config(Path::new("/nonexistent/config.toml")).is_err());
}

#[test]
fn presets_parse_validate_and_have_the_published_shapes() {
    assert_eq!(preset_names(), ["fig2", "fig3", "fig4", "fig5", "desk"]);
    for name in preset_names() {
        let cfg = preset(name).unwrap();
        cfg.validate().unwrap();
        // Every preset's TOML round-trips to the same task list.
        let text = preset_toml(name).unwrap();
        let parsed: BenchmarkConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed.tasks(), cfg.tasks(), "{name}: TOML drifted");
    }

    let fig2 = preset("fig2").unwrap();
    assert_eq!(fig2.k, 100);
    assert_eq!(fig2.tasks().len(), 4, "one cell, four methods");

    let fig3 = preset("fig3").unwrap();
    let fig3_cells: BTreeSet<CellKey> =
        fig3.tasks().iter().map(|(c, _)| *c).collect();
    assert_eq!(fig3_cells.len(), 30, "6 sparsities × 5 ratios");

    let fig4 = preset("fig4").unwrap();
    let fig4_dists: BTreeSet<WeightDistribution> =
        fig4.tasks().iter().map(|(c, _)| c.distribution).collect();
    assert_eq!(fig4_dists.len(), 4);

    let fig5 = preset("fig5").unwrap();
    let noises: BTreeSet<u64> =
        fig5.tasks().iter().map(|(c, _)| c.noise_factor.to_bits()).collect();
    assert_eq!(noises.len(), 6);
    assert!(fig5.tasks().iter().any(|(c, _)| c.noise_factor == 0.0));

    let desk = preset("desk").unwrap();
    assert_eq!(desk.k, 20);
    assert_eq!(desk.iterations, 20);
    let desk_cells: BTreeSet<CellKey> =
        desk.tasks().iter().map(|(c, _)| *c).collect();
    // Noise sweep (6) + four-distribution block (4·2) + fig2-like cell
    // + ratio-1 failure cell; the 2/3-sparsity ratio-3 symexp cell overlaps
    // nothing.
    assert!(desk_cells.len() >= 12, "desk grid too small: {}", desk_cells.len());
    assert!(preset("fig6").is_err());
}

#[test]
fn config_hash_tracks_result_defining_fields_only() {
    let base = preset("desk").unwrap();
    let hash = base.config_hash();
    assert_eq!(hash, preset("desk").unwrap().config_hash(), "hash must be stable");

    let mut fewer_methods = base.clone();
    fewer_methods.methods = vec![Method::Boats];
    assert_eq!(hash, fewer_methods.config_hash(), "methods identify rows, not results");

    let mut smaller_grid = base.clone();
    smaller_grid.grids.truncate(1);
    assert_eq!(hash, smaller_grid.config_hash(), "grid coordinates identify rows");

    let mut different_k = base.clone();
    different_k.k = 21;
    assert_ne!(hash, different_k.config_hash());

    let mut different_seed = base.clone();
    different_seed.master_seed = 43;
    assert_ne!(hash, different_seed.config_hash());

    let mut different_iterations = base.clone();
    different_iterations.iterations = 21;
    assert_ne!(hash, different_iterations.config_hash());

    let mut different_sweep = base.clone();
    different_sweep.sweep.fine_points = 17;
    assert_ne!(hash, different_sweep.config_hash());

    let mut different_params = base.clone();
    different_params.distribution_params.laplace_scale = 2.0;
    assert_ne!(hash, different_params.config_hash());
}

#[test]
fn cell_seeds_pair_methods_and_separate_cells() {
    let cfg = preset("desk").unwrap();
    let cells: Vec<CellKey> = {
        let unique: BTreeSet<CellKey> = cfg.tasks().iter().map(|(c, _)| *c).collect();
        unique.into_iter().collect()
    };
    let mut seeds = BTreeSet::new();
    for cell in &cells {
        assert!(seeds.insert(cell.cell_seed(cfg.master_seed)), "cell seeds must differ");
    }
    // Same cell, same seed, regardless of the method that consumes it —
    // methods see identical data, so comparisons are paired.
    let c = cells[0];
    assert_eq!(c.cell_seed(42), c.cell_seed(42));
    assert_ne!(c.cell_seed(42), c.cell_seed(43));
}

#[test]
fn benchmark_computes_resumes_and_extends() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let cfg = load_config(&write_config(dir.path(), &tiny_config_toml(8, 4, 11))).unwrap();

    let first = run_benchmark(&cfg, &out, None, false).unwrap();
    assert_eq!((first.total, first.computed, first.reused), (4, 4, 0));
    assert_eq!(first.failed_cells, 0);
    let bytes_first = fs::read(&out).unwrap();

    // Identical config: everything is reused and the file is unchanged.
    let second = run_benchmark(&cfg, &out, None, false).unwrap();
    assert_eq!((second.total, second.computed, second.reused), (4, 0, 4));
    assert_eq!(fs::read(&out).unwrap(), bytes_first);

    // A third method extends the file without recomputing the old rows.
    let mut wider = cfg.clone();
    wider.methods.push(Method::Lasso);
    let third = run_benchmark(&wider, &out, None, false).unwrap();
    assert_eq!((third.total, third.computed, third.reused), (6, 2, 4));
    let rows = read_results(&out).unwrap();
    assert_eq!(rows.len(), 6);

    // Changing a result-defining field invalidates every row.
    let mut reseeded = cfg.clone();
    reseeded.master_seed = 12;
    let fourth = run_benchmark(&reseeded, &out, None, false).unwrap();
    assert_eq!((fourth.total, fourth.computed, fourth.reused), (4, 4, 0));
}

#[test]
fn benchmark_rows_come_back_in_canonical_order_with_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let cfg = load_config(&write_config(dir.path(), &tiny_config_toml(8, 4, 13))).unwrap();
    run_benchmark(&cfg, &out, None, false).unwrap();
    let rows = read_results(&out).unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<(CellKey, Method)> = rows.iter().map(|r| (r.cell, r.method)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted, "rows must be written in canonical order");
    for row in &rows {
        assert_eq!(row.iterations, 4);
        assert_eq!(row.d, 16);
        assert_eq!(row.m, 64);
        assert!(row.error.is_empty());
        assert_eq!(row.runtime_seconds, 0.0, "timing off by default");
        let metrics = row.metrics.as_ref().expect("successful rows carry metrics");
        assert!(metrics.mean_test_r2.is_finite());
        assert!(metrics.mean_support_size > 0.0);
        if row.method == Method::Boats {
            assert!(metrics.estimation_variability.is_some());
        }
    }
}

#[test]
fn failed_cells_are_recorded_not_fatal() {
    // sample_ratio low enough that the select split floors to zero rows.
    let dir = tempfile::tempdir().unwrap();
    let body = tiny_config_toml(8, 4, 17).replace("sample_ratios = [4.0]", "sample_ratios = [0.5]");
    let cfg = load_config(&write_config(dir.path(), &body)).unwrap();
    let out = dir.path().join("results.csv");
    let outcome = run_benchmark(&cfg, &out, None, false).unwrap();
    assert_eq!(outcome.failed_cells, outcome.total);
    let rows = read_results(&out).unwrap();
    for row in &rows {
        assert!(!row.error.is_empty());
        assert!(row.metrics.is_none());
        assert_eq!(row.failures, cfg.iterations);
    }
    // A later run retries failed rows rather than resuming them... unless
    // the config still matches, in which case the failure is trusted.
    let again = run_benchmark(&cfg, &out, None, false).unwrap();
    assert_eq!(again.reused, 4);
}

#[test]
fn results_file_round_trips_bytewise() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let cfg = load_config(&write_config(dir.path(), &tiny_config_toml(8, 4, 19))).unwrap();
    run_benchmark(&cfg, &out, None, false).unwrap();
    let rows = read_results(&out).unwrap();
    let copy = dir.path().join("copy.csv");
    write_results(&copy, &rows).unwrap();
    assert_eq!(fs::read(&out).unwrap(), fs::read(&copy).unwrap());
}

#[test]
fn results_reader_rejects_foreign_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b,c\n1,2,3\n").unwrap();
    let err: boats::Error = read_results(&bad).unwrap_err();
    assert!(err.to_string().contains("header"), "{err}");

    let out = dir.path().join("results.csv");
    let cfg = load_config(&write_config(dir.path(), &tiny_config_toml(8, 4, 23))).unwrap();
    run_benchmark(&cfg, &out, None, false).unwrap();
    let mut text = fs::read_to_string(&out).unwrap();
    text = text.replace(&format!("\n{SCHEMA_VERSION},"), "\n999,");
    fs::write(&out, text).unwrap();
    assert!(read_results(&out).is_err(), "future schema versions must not parse");
}

#[test]
fn overlapping_grid_blocks_dedupe_into_one_task_each() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{}\n[[grid]]\ndistributions = [\"laplace\"]\nsparsities = [0.5]\nsample_ratios = [4.0]\nnoise_factors = [0.1]\n",
        tiny_config_toml(8, 4, 29)
    );
    let cfg = load_config(&write_config(dir.path(), &body)).unwrap();
    // The second block duplicates a cell of the first; tasks dedupe.
    assert_eq!(cfg.tasks().len(), 4);
}
