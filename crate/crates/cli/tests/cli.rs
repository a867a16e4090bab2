use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qridge_cli::{load_csv, render};
use qridge_core::fixtures::{matrix_from_spectrum, random_unit, rng};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qridge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qridge")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_dataset(dir: &Path, name: &str, x: &qridge_core::linalg::RealMatrix, y: &[f64]) -> PathBuf {
    let mut text = String::new();
    let names: Vec<String> = (0..x.cols()).map(|c| format!("f{c}")).collect();
    text.push_str(&names.join(","));
    text.push_str(",y\n");
    for (r, target) in y.iter().enumerate() {
        let cells: Vec<String> = x.row(r).iter().map(|v| format!("{v:e}")).collect();
        text.push_str(&format!("{},{target:e}\n", cells.join(",")));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn identity_prediction_reports_small_error() {
    let out = qridge(&["predict", "--data", fixture("identity.csv").to_str().unwrap(), "--x-new", "1,0", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["abs_error"].as_f64().unwrap() <= 1e-3);
    assert_eq!(r["mode"], "predict");
    assert_eq!(r["config"]["exact"], true);
}

#[test]
fn diagonal_prediction_near_oracle() {
    let out = qridge(&["predict", "--data", fixture("diagonal.csv").to_str().unwrap(), "--x-new", "1,1", "--alpha", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["outcome"]["y_prime"].as_f64().unwrap() - 1.8).abs() < 2e-2);
}

#[test]
fn failure_exit_codes() {
    let identity = fixture("identity.csv");
    let bad_query = qridge(&["predict", "--data", identity.to_str().unwrap(), "--x-new", "1,0,2", "--alpha", "0.1"]);
    assert_eq!(bad_query.status.code(), Some(2));
    assert_eq!(report(&bad_query)["error"]["kind"], "usage");

    let nan = qridge(&["spectrum", "--data", fixture("nan_cell.csv").to_str().unwrap()]);
    assert_eq!(nan.status.code(), Some(2));
    assert!(report(&nan)["error"]["message"].as_str().unwrap().contains("x2"));

    let zero = qridge(&["spectrum", "--data", fixture("zero_design.csv").to_str().unwrap()]);
    assert_eq!(zero.status.code(), Some(1));
    assert_eq!(report(&zero)["error"]["kind"], "numerical");

    let no_y = qridge(&["spectrum", "--data", fixture("missing_y.csv").to_str().unwrap()]);
    assert_eq!(no_y.status.code(), Some(2));

    let negative = qridge(&[
        "tune", "--data", identity.to_str().unwrap(), "--alpha-min", "-0.1", "--alpha-max", "1", "--alpha-count", "3",
    ]);
    assert_eq!(negative.status.code(), Some(2));

    let unknown_flag = qridge(&["spectrum", "--data", identity.to_str().unwrap(), "--bogus"]);
    assert_eq!(unknown_flag.status.code(), Some(2));

    let too_many_bits = qridge(&["spectrum", "--data", identity.to_str().unwrap(), "--bits", "13"]);
    assert_eq!(too_many_bits.status.code(), Some(2));
}

#[test]
fn spectrum_reports() {
    let r = report(&qridge(&["spectrum", "--data", fixture("identity.csv").to_str().unwrap()]));
    assert_eq!(r["rank"], 2);
    assert!((r["condition_number"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["dyadic_by_bits"]["02"], true);
}

#[test]
fn tune_on_conditioned_fixture_agrees_with_classical() {
    let dir = tempfile::tempdir().unwrap();
    let x = matrix_from_spectrum(&mut rng(50), 8, 4, &[1.0, 0.6, 0.2]).unwrap();
    let y = random_unit(&mut rng(51), 8);
    let data = write_dataset(dir.path(), "k5.csv", &x, &y);
    let out = qridge(&["tune", "--data", data.to_str().unwrap(), "--alpha-count", "8", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((r["condition_number"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    assert_eq!(r["results"].as_array().unwrap().len(), 8);
    assert_eq!(r["selected_alpha"], r["classical_selected_alpha"]);
}

#[test]
fn tune_singleton_grid() {
    let out = qridge(&[
        "tune", "--data", fixture("diagonal.csv").to_str().unwrap(), "--alpha-min", "0.3", "--alpha-max", "0.3", "--alpha-count", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["selected_alpha"].as_f64(), Some(0.3));
}

#[test]
fn compare_reproduces_fitted_values() {
    let out = qridge(&["compare", "--data", fixture("diagonal.csv").to_str().unwrap(), "--alpha", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for row in r["rows"].as_array().unwrap() {
        let fitted = row["fitted_value"].as_f64().unwrap();
        assert!((row["classical"].as_f64().unwrap() - fitted).abs() < 1e-12);
        assert!(row["normalized_error"].as_f64().unwrap() <= row["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn report_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qridge(&[
        "predict", "--data", fixture("diagonal.csv").to_str().unwrap(), "--x-new", "1,-1", "--alpha", "0.5",
        "--shots", "2000", "--seed", "4", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(render(&parsed), text);
    assert_eq!(parsed["config"]["seed"], 4);
}

#[test]
fn standardize_flag_changes_design() {
    let plain = report(&qridge(&["spectrum", "--data", fixture("diagonal.csv").to_str().unwrap()]));
    let scaled = report(&qridge(&["spectrum", "--data", fixture("diagonal.csv").to_str().unwrap(), "--standardize"]));
    assert_eq!(scaled["dataset"]["standardized"], true);
    assert_ne!(plain["singular_values"], scaled["singular_values"]);
}

#[test]
fn large_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("a,b,c,d,e,f,g,h,y\n");
    for i in 0..1000 {
        let cells: Vec<String> = (0..9).map(|j| format!("{}", ((i * 7 + j * 13) % 17) as f64 / 3.0)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let path = dir.path().join("big.csv");
    std::fs::write(&path, text).unwrap();
    let d = load_csv(&path).unwrap();
    assert_eq!((d.rows(), d.features()), (1000, 8));
}
