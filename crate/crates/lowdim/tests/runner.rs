use std::path::PathBuf;

use lowdim::config::{DnnParams, ExperimentConfig, GridParams};
use lowdim::core::approx::BuiltinTarget;
use lowdim::core::geometry::SupportKind;
use lowdim::core::regression::{mean_std, run_replication, CellSpec, Method};
use lowdim::runner::{run_experiment, write_outputs};

fn config(methods: &[&str], n_list: Vec<usize>, replications: u64) -> ExperimentConfig {
    ExperimentConfig {
        target: "sim62".into(),
        ambient_dim: 5,
        d_list: vec![2],
        n_list,
        replications,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        master_seed: 3,
        output: PathBuf::from("unused.csv"),
        support: "lp_ball_union".into(),
        sigma2: 0.1,
        validation_size: 400,
        discard_largest: 0,
        replications_output: None,
        plot_dir: None,
        dnn: DnnParams {
            epochs: 40,
            init: "he".into(),
            ..DnnParams::default()
        },
        knn: GridParams::default(),
        nw: GridParams::default(),
        folds: 5,
    }
}

#[test]
fn single_cell_single_replication() {
    let cfg = config(&["knn"], vec![30], 1);
    let res = run_experiment(&cfg, false).unwrap();
    assert_eq!(res.rows.len(), 1);
    let cell = CellSpec {
        target: BuiltinTarget::Sim62,
        support: SupportKind::LpBallUnion { d: 2, dim: 5 },
        n: 30,
        sigma2: 0.1,
        validation_size: 400,
    };
    let direct = run_replication(&cell, Method::Knn, &cfg.method_params().unwrap(), 3, 0).unwrap();
    assert_eq!(res.rows[0].mean_error, direct.error);
    assert_eq!(res.rows[0].std_error, 0.0);
    assert_eq!(res.rows[0].replications, 1);
    assert_eq!(res.replications[0].hyperparameter, direct.hyperparameter);
}

#[test]
fn summary_matches_replication_rows() {
    let cfg = config(&["dnn", "nw"], vec![20, 40], 4);
    let res = run_experiment(&cfg, false).unwrap();
    assert_eq!(res.rows.len(), 4);
    assert_eq!(res.replications.len(), 16);
    for row in &res.rows {
        let errs: Vec<f64> = res
            .replications
            .iter()
            .filter(|r| r.method == row.method && r.n == row.n)
            .map(|r| r.error)
            .collect();
        let (m, s) = mean_std(&errs);
        assert_eq!((row.mean_error, row.std_error, row.replications), (m, s, 4));
    }
    let order: Vec<(String, usize)> = res.rows.iter().map(|r| (r.method.clone(), r.n)).collect();
    assert_eq!(
        order,
        vec![
            ("dnn".into(), 20),
            ("dnn".into(), 40),
            ("nw".into(), 20),
            ("nw".into(), 40)
        ]
    );
}

#[test]
fn shared_cells_survive_a_shorter_n_list() {
    let full = run_experiment(&config(&["knn", "nw"], vec![20, 40, 60], 2), false).unwrap();
    let prefix = run_experiment(&config(&["knn", "nw"], vec![20, 40], 2), false).unwrap();
    for row in &prefix.rows {
        assert!(full.rows.contains(row));
    }
}

#[test]
fn pool_size_does_not_change_results() {
    let cfg = config(&["dnn", "knn"], vec![20, 30], 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg, false).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
}

#[test]
fn failing_cells_become_failure_rows() {
    let cfg = config(&["knn"], vec![3, 30], 2);
    let res = run_experiment(&cfg, false).unwrap();
    assert!(!res.rows[0].is_ok());
    assert!(
        res.rows[0].status.contains("folds"),
        "{}",
        res.rows[0].status
    );
    assert!(res.rows[0].mean_error.is_nan());
    assert!(res.rows[1].is_ok());
    assert!(res.replications.iter().all(|r| r.n == 30));
}

#[test]
fn discarding_the_largest_errors() {
    let mut cfg = config(&["nw"], vec![25], 5);
    let all = run_experiment(&cfg, false).unwrap();
    cfg.discard_largest = 2;
    let trimmed = run_experiment(&cfg, false).unwrap();
    let mut errs: Vec<f64> = all.replications.iter().map(|r| r.error).collect();
    errs.sort_by(f64::total_cmp);
    let (m, _) = mean_std(&errs[..3]);
    assert_eq!(trimmed.rows[0].replications, 3);
    assert_eq!(trimmed.rows[0].mean_error, m);
    assert!(trimmed.rows[0].mean_error <= all.rows[0].mean_error);
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(&["knn", "nw"], vec![20, 40], 2);
    cfg.output = dir.path().join("res.csv");
    cfg.plot_dir = Some(dir.path().join("plots"));
    let res = run_experiment(&cfg, false).unwrap();
    let files = write_outputs(&cfg, &res).unwrap();
    assert_eq!(files.replications, dir.path().join("res.replications.csv"));
    assert_eq!(
        lowdim::io::read_results_csv(&files.results).unwrap(),
        res.rows
    );
    assert_eq!(
        lowdim::io::read_replications_csv(&files.replications).unwrap(),
        res.replications
    );
    assert_eq!(files.plots.len(), 2);
    let svg = std::fs::read_to_string(&files.plots[0]).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("exp.toml");
    std::fs::write(
        &toml,
        "target = \"sim61\"\nD = 16\nd_list = [2, 8]\nn_list = [100]\nreplications = 2\n\
         methods = [\"dnn\"]\nmaster_seed = 5\noutput = \"out/r.csv\"\n\n[dnn]\ninit = \"he\"\nepochs = 10\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&toml).unwrap();
    assert_eq!(cfg.output, dir.path().join("out/r.csv"));
    assert_eq!(cfg.support, "sphere");
    assert_eq!(cfg.sigma2, 0.1);
    assert_eq!(cfg.validation_size, 10_000);
    assert_eq!(cfg.dnn.epochs, 10);

    let json = dir.path().join("exp.json");
    let mut as_json = serde_json::to_value(&cfg).unwrap();
    as_json["output"] = "out/r.csv".into();
    std::fs::write(&json, as_json.to_string()).unwrap();
    assert_eq!(ExperimentConfig::load(&json).unwrap(), cfg);

    for (edit, needle) in [
        (("methods", serde_json::json!(["svm"])), "unknown method"),
        (("target", serde_json::json!("sim9")), "unknown target"),
        (("d_list", serde_json::json!([16])), "d = 16"),
        (("replications", serde_json::json!(0)), "replications"),
        (("bogus", serde_json::json!(1)), "unknown field"),
    ] {
        let mut v = as_json.clone();
        v[edit.0] = edit.1;
        std::fs::write(&json, v.to_string()).unwrap();
        let err = ExperimentConfig::load(&json).unwrap_err().to_string();
        assert!(err.contains(needle), "{err}");
    }
}
