use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lowdim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowdim"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lowdim(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn koch_support_and_box_counting() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let msg = ok(
        d,
        &[
            "support", "generate", "--kind", "koch", "--n", "100000", "--seed", "7", "--out",
            "koch.csv",
        ],
    );
    assert!(msg.contains("100000 points"));
    let text = fs::read_to_string(d.join("koch.csv")).unwrap();
    assert_eq!(text.lines().count(), 100_001);

    let out = ok(
        d,
        &[
            "dim",
            "estimate",
            "--method",
            "boxcount",
            "--scales",
            "0.333,0.111,0.037",
            "--input",
            "koch.csv",
        ],
    );
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("method,estimate,gamma,count,low_confidence")
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let est: f64 = fields[1].parse().unwrap();
    assert!((est - 1.26).abs() < 0.1, "estimate {est}");
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn lpca_and_ml_from_csv_and_idx() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "support", "generate", "--kind", "sphere", "--d", "2", "--D", "4", "--n", "3000",
            "--seed", "1", "--out", "s.csv",
        ],
    );
    let out = ok(
        d,
        &[
            "dim", "estimate", "--method", "lpca", "--k", "12", "--input", "s.csv",
        ],
    );
    assert_eq!(out.lines().nth(1), Some("lpca,2,12,0.95"));
    let out = ok(
        d,
        &["dim", "estimate", "--method", "ml", "--input", "s.csv"],
    );
    let ml: f64 = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((ml - 2.0).abs() < 0.4, "ml {ml}");

    // 12 random 3×3 images.
    let mut bytes = vec![0, 0, 8, 3, 0, 0, 0, 12, 0, 0, 0, 3, 0, 0, 0, 3];
    bytes.extend((0..108u32).map(|i| ((i * 37 + 11) % 256) as u8));
    fs::write(d.join("imgs.idx"), bytes).unwrap();
    let out = ok(
        d,
        &[
            "dim", "estimate", "--method", "lpca", "--k", "5", "--input", "imgs.idx",
        ],
    );
    assert!(out.starts_with("method,estimate"));
}

#[test]
fn approx_build_then_inspect_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "support", "generate", "--kind", "sphere", "--d", "1", "--D", "2", "--n", "2000",
            "--seed", "3", "--out", "c.csv",
        ],
    );
    let msg = ok(
        d,
        &[
            "approx",
            "build",
            "--beta",
            "2",
            "--M",
            "1",
            "--epsilon",
            "0.2",
            "--support",
            "c.csv",
            "--out",
            "net.json",
            "--report",
            "report.csv",
        ],
    );
    assert!(msg.contains("W="));
    let report = fs::read_to_string(d.join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("epsilon,W,L,B,empirical_sup_error"));
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 0.2);
    assert!(row[4] <= 0.2);

    let inspect = ok(d, &["net", "inspect", "--net", "net.json"]);
    assert!(
        inspect.contains(&format!("W={} L={}", row[1], row[2])),
        "{inspect}"
    );

    ok(
        d,
        &[
            "net", "eval", "--net", "net.json", "--input", "c.csv", "--out", "pred.csv",
        ],
    );
    let preds = fs::read_to_string(d.join("pred.csv")).unwrap();
    let points = fs::read_to_string(d.join("c.csv")).unwrap();
    let mut worst: f64 = 0.0;
    for (p, x) in preds.lines().skip(1).zip(points.lines().skip(1)) {
        let x: Vec<f64> = x.split(',').map(|v| v.parse().unwrap()).collect();
        let p: f64 = p.parse().unwrap();
        worst = worst.max((p - (x[0] + x[1]).sin()).abs());
    }
    assert!(worst <= 0.2, "worst {worst}");
    assert_eq!(preds.lines().count(), 2001);

    let sweep = ok(
        d,
        &[
            "approx",
            "rate-sweep",
            "--beta",
            "2",
            "--M",
            "1",
            "--epsilons",
            "0.4,0.2,0.1",
            "--support",
            "c.csv",
            "--report",
            "sweep.csv",
        ],
    );
    assert!(sweep.contains("slope"));
    assert_eq!(
        fs::read_to_string(d.join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );
}

#[test]
fn exp_run_twice_is_byte_identical_and_fit_rate_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("exp.toml"),
        "target = \"sim62\"\nD = 5\nd_list = [2]\nn_list = [20, 40, 80]\nreplications = 2\n\
         methods = [\"knn\", \"nw\"]\nmaster_seed = 9\noutput = \"r.csv\"\nsupport = \"lp_ball_union\"\n\
         validation_size = 500\nplot_dir = \"plots\"\n",
    )
    .unwrap();
    ok(d, &["--quiet", "exp", "run", "--config", "exp.toml"]);
    let first = fs::read(d.join("r.csv")).unwrap();
    ok(d, &["--quiet", "exp", "run", "--config", "exp.toml"]);
    assert_eq!(first, fs::read(d.join("r.csv")).unwrap());
    assert!(d.join("plots/knn_d2.svg").exists() && d.join("plots/nw_d2.svg").exists());

    let rates = ok(d, &["exp", "fit-rate", "--input", "r.csv"]);
    let mut lines = rates.lines();
    assert_eq!(
        lines.next(),
        Some("method,D,d,slope,intercept,r_squared,points")
    );
    assert!(lines.next().unwrap().starts_with("knn,5,2,"));
    assert!(lines.next().unwrap().starts_with("nw,5,2,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(lowdim(d, &["--bogus"]).status.code(), Some(2));
    assert_eq!(lowdim(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        lowdim(
            d,
            &["dim", "estimate", "--method", "pca", "--input", "x.csv"]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        lowdim(d, &["--threads", "0", "net", "inspect", "--net", "n.json"])
            .status
            .code(),
        Some(2)
    );

    let missing = lowdim(d, &["net", "inspect", "--net", "missing.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));

    fs::write(
        d.join("bad.json"),
        r#"{"input_dim":2,"layers":[{"weight":[[1,2],[3]],"bias":[0,0]}]}"#,
    )
    .unwrap();
    let bad = lowdim(d, &["net", "inspect", "--net", "bad.json"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("row 2"));

    fs::write(d.join("p.csv"), "x1,x2\n0.5,0.5\n").unwrap();
    let few = lowdim(
        d,
        &[
            "dim", "estimate", "--method", "boxcount", "--scales", "0.5,0.25", "--input", "p.csv",
        ],
    );
    assert_eq!(few.status.code(), Some(1));
}
