//! End-to-end runs of the `bilgamma` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bilgamma::finance::price_call_atm;
use bilgamma::models;
use tempfile::TempDir;

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bilgamma"));
    cmd.args(args).env_remove("BILGAMMA_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Rows of a CSV file with every cell parsed, empty cells as `None`.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| if c.is_empty() { None } else { Some(c.parse().unwrap()) }).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const LAPLACE: &str = r#"{"components": [{"alpha": 1.5, "p": 1, "beta": 1.5, "q": 1, "w1": 1, "w2": 1}]}"#;
const SYMMETRIC: &str = r#"{"components": [
    {"alpha": 1.5, "p": 0.8, "beta": 1.5, "q": 0.8, "w1": 1, "w2": 1},
    {"alpha": 2.5, "p": 1.3, "beta": 2.5, "q": 1.3, "w1": 0.7, "w2": 0.7}]}"#;
const GAMMA_DRIVEN: &str = r#"{"terms": [{"alpha": 4, "p": 1.5, "w": 1}, {"alpha": 3, "p": 2, "w": 0.5}]}"#;

#[test]
fn laplace_pdf_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", LAPLACE);
    let out_path = dir.path().join("pdf.csv");
    let out = run(
        &["pdf", "--model", s(&model), "--xmin", "-4", "--xmax", "4", "--points", "81", "--out", s(&out_path)],
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&out_path);
    assert_eq!(header, ["x", "pdf_fourier", "pdf_series", "abs_diff"]);
    assert_eq!(rows.len(), 81);
    for row in &rows {
        let x = row[0].unwrap();
        let exact = 0.75 * (-1.5 * x.abs()).exp();
        assert!((row[1].unwrap() - exact).abs() < 1e-7, "fourier at {x}");
        match row[2] {
            Some(series) => assert!((series - exact).abs() < 1e-7, "series at {x}"),
            None => assert_eq!(x, 0.0, "only the origin lacks a series value"),
        }
    }
}

#[test]
fn symmetric_model_has_symmetric_pdf() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SYMMETRIC);
    let out_path = dir.path().join("pdf.csv");
    let out = run(&["pdf", "--model", s(&model), "--points", "41", "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&out_path);
    for (a, b) in rows.iter().zip(rows.iter().rev()) {
        assert_eq!(a[0].unwrap(), -b[0].unwrap());
        assert!((a[1].unwrap() - b[1].unwrap()).abs() < 1e-9);
    }
}

#[test]
fn malformed_model_exits_2_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let unknown = write(&dir, "a.json", r#"{"components": [{"alpha": 1, "p": 1, "beta": 1, "q": 1, "w1": 1, "w2": 1, "gamma": 2}]}"#);
    let out = run(&["moments", "--model", s(&unknown)], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gamma"), "{}", stderr(&out));

    let missing = write(&dir, "b.json", r#"{"components": [{"alpha": 1, "p": 1, "beta": 1, "q": 1, "w1": 1}]}"#);
    let out = run(&["moments", "--model", s(&missing)], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("w2"), "{}", stderr(&out));

    let negative = write(&dir, "c.json", r#"{"components": [{"alpha": -1, "p": 1, "beta": 1, "q": 1, "w1": 1, "w2": 1}]}"#);
    let out = run(&["moments", "--model", s(&negative)], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));
}

#[test]
fn moments_report_closed_form_and_mixture_moments() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", LAPLACE);
    let out_path = dir.path().join("moments.json");
    let out = run(&["moments", "--model", s(&model), "--kmax", "4", "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&out_path);
    let orders = v["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 4);
    // Laplace(1.5): variance 2/α², fourth moment 24/α⁴.
    let var = 2.0 / 1.5f64.powi(2);
    assert!((v["variance"].as_f64().unwrap() - var).abs() < 1e-12);
    assert!((orders[1]["raw_moment"].as_f64().unwrap() - var).abs() < 1e-9);
    assert!((orders[3]["raw_moment"].as_f64().unwrap() - 24.0 / 1.5f64.powi(4)).abs() < 1e-8);
    assert!(orders[0]["raw_moment"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn cf_columns_agree() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SYMMETRIC);
    let out_path = dir.path().join("cf.csv");
    let out = run(&["cf", "--model", s(&model), "--zmax", "10", "--points", "21", "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&out_path);
    assert_eq!(header, ["z", "cf_re", "cf_im", "mixture_re", "mixture_im", "abs_diff"]);
    assert!(rows.iter().all(|r| r[5].unwrap() < 1e-8));
}

#[test]
fn sampling_is_reproducible_and_needs_a_seed() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SYMMETRIC);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let out = run(
            &["sample", "--model", s(&model), "--n", "5000", "--seed", "42", "--method", "mixture", "--out", s(path)],
            &[("BILGAMMA_THREADS", threads)],
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let (_, rows) = read_csv(&a);
    assert_eq!(rows.len(), 5000);

    let out = run(&["sample", "--model", s(&model), "--n", "10"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn invalid_thread_count_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", LAPLACE);
    let out = run(&["moments", "--model", s(&model)], &[("BILGAMMA_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn self_target_bound_vanishes() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"components": [{"alpha": 2, "p": 1.5, "beta": 3, "q": 0.7, "w1": 1, "w2": 1}]}"#);
    let target = write(&dir, "t.json", r#"{"alpha": 2, "p": 1.5, "beta": 3, "q": 0.7}"#);
    let out_path = dir.path().join("b.json");
    let out = run(&["bounds", "--model", s(&model), "--target", s(&target), "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&out_path);
    assert_eq!(v["constants_default"], true);
    assert_eq!(v["kappa"]["defined"], true);
    let d3 = &v["d3_bg"];
    assert!(d3["value"].as_f64().unwrap().abs() < 1e-12);
    for term in ["scale", "asymmetry", "shape", "mean"] {
        assert!(d3["terms"][term].as_f64().unwrap().abs() < 1e-12, "{term}");
    }
}

#[test]
fn undefined_kappa_exits_3_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"components": [{"alpha": 1, "p": 1, "beta": 1, "q": 1, "w1": 1, "w2": 1}]}"#);
    let out = run(&["bounds", "--model", s(&model), "--sigma", "1.0"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("KappaUndefined"), "{err}");
    let payload: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(payload["g_n"], 1.0);
    assert_eq!(payload["h_n"], 1.0);
}

#[test]
fn two_sum_bound_of_identical_models_is_zero() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SYMMETRIC);
    let out_path = dir.path().join("b.json");
    let out = run(&["bounds", "--model", s(&model), "--other", s(&model), "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&out_path);
    assert_eq!(v["two_sums"]["value"], 0.0);
    assert_eq!(v["two_sums"]["label"], "bound shape");
}

#[test]
fn cp_sweep_bound_column_is_monotone() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SYMMETRIC);
    let out_path = dir.path().join("sweep.csv");
    let out = run(
        &["cp-sweep", "--model", s(&model), "--m", "1,2,4,8,16,32,64", "--n", "20000", "--seed", "7", "--out", s(&out_path)],
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&out_path);
    assert_eq!(header, ["m", "d_k", "ks_noise", "bound", "bound_fitted"]);
    assert_eq!(rows.len(), 7);
    for w in rows.windows(2) {
        assert!(w[1][3].unwrap() < w[0][3].unwrap());
        assert!(w[1][4].unwrap() < w[0][4].unwrap());
        // The Monte Carlo distance decreases up to twice its sampling noise.
        assert!(w[1][1].unwrap() <= w[0][1].unwrap() + 2.0 * w[0][2].unwrap());
    }
}

#[test]
fn deep_out_of_the_money_price_is_negligible() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"components": [
        {"alpha": 3, "p": 1.2, "beta": 4, "q": 0.8, "w1": 1, "w2": 1},
        {"alpha": 5, "p": 0.7, "beta": 3, "q": 1.1, "w1": 1.5, "w2": 0.9}]}"#);
    let pricing = write(&dir, "p.json", r#"{"s0": 1, "strike": 1e6, "rate": 0.03, "maturity": 1}"#);
    let out_path = dir.path().join("price.json");
    let out = run(&["price", "--model", s(&model), "--pricing", s(&pricing), "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&out_path);
    assert_eq!(v["method"], "integral");
    let price = v["price"].as_f64().unwrap();
    assert!((0.0..1e-8).contains(&price), "{price}");
    assert!(v["martingale_gap"].is_number());
    assert!(v["martingale_diagnostics"].is_object());
}

#[test]
fn gamma_driven_at_the_money_uses_the_closed_form() {
    let dir = TempDir::new().unwrap();
    write(&dir, "m.json", GAMMA_DRIVEN);
    let pricing = write(
        &dir,
        "p.json",
        r#"{"s0": 1, "strike": 1, "rate": 0.03, "dividend": 0.01, "maturity": 1, "model": "m.json"}"#,
    );
    let out_path = dir.path().join("price.json");
    let out = run(&["price", "--pricing", s(&pricing), "--out", s(&out_path)], &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&out_path);
    assert_eq!(v["method"], "atm");
    let mix = models::gamma_driven().mixture(1e-12, 10_000).unwrap();
    let expected = price_call_atm(&mix, &models::gamma_driven_inputs(1.0)).unwrap().price;
    assert!((v["price"].as_f64().unwrap() - expected).abs() <= 1e-12 * expected);
}

#[test]
fn price_outside_the_strip_exits_3() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", r#"{"terms": [{"alpha": 0.8, "p": 1.5, "w": 1}]}"#);
    let pricing = write(&dir, "p.json", r#"{"s0": 1, "strike": 1.2, "rate": 0.03, "maturity": 1}"#);
    let out = run(&["price", "--model", s(&model), "--pricing", s(&pricing)], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("OutOfStrip"), "{}", stderr(&out));
}

#[test]
fn monte_carlo_price_needs_a_seed() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", GAMMA_DRIVEN);
    let pricing = write(&dir, "p.json", r#"{"s0": 1, "strike": 1.2, "rate": 0.03, "maturity": 1}"#);
    let args = ["price", "--model", s(&model), "--pricing", s(&pricing), "--method", "monte-carlo", "--n", "20000"];
    let out = run(&args, &[]);
    assert_eq!(out.status.code(), Some(2));
    let out_path = dir.path().join("mc.json");
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "11", "--out", s(&out_path)]);
    let out = run(&seeded, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(read_json(&out_path)["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulated_paths_start_at_zero() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SYMMETRIC);
    let out_path = dir.path().join("paths.csv");
    let out = run(
        &["simulate", "--model", s(&model), "--tgrid", "0:0.1:1", "--paths", "4", "--seed", "3", "--out", s(&out_path)],
        &[],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&out_path);
    assert_eq!(header, ["t", "path_0", "path_1", "path_2", "path_3"]);
    assert_eq!(rows.len(), 11);
    assert!(rows[0][1..].iter().all(|v| *v == Some(0.0)));
    assert_eq!(rows[10][0], Some(1.0));

    let out = run(&["simulate", "--model", s(&model), "--tgrid", "0.5:0.1:1", "--paths", "1", "--seed", "3"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_reproducible_and_detects_the_fault() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "2")] {
        let out = run(
            &["verify", "--suite", "quick", "--seed", "1", "--out", s(path)],
            &[("BILGAMMA_THREADS", threads)],
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(read_json(&a)["passed"], true);

    let c = dir.path().join("c.json");
    let out = run(
        &["verify", "--suite", "quick", "--seed", "1", "--inject-fault", "gamma-recursion", "--out", s(&c)],
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let report = read_json(&c);
    assert_eq!(report["passed"], false);
    let failed: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["invariant"].as_str().unwrap().to_string())
        .collect();
    assert!(failed.iter().any(|i| i.contains("cf")), "{failed:?}");
}

#[test]
fn verify_needs_a_seed() {
    let out = run(&["verify", "--suite", "quick"], &[]);
    assert_eq!(out.status.code(), Some(2));
}
