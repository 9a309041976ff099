use std::process::{Command, Output};

use lorentzvol::record::as_f64;
use lorentzvol::{OutputRecord, EXIT_CONSTRUCTION, EXIT_OK, EXIT_PRECISION, EXIT_USAGE};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lorentzvol"))
        .args(args)
        .env_remove("LORENTZVOL_BITS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> OutputRecord {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = bin(&full);
    assert_eq!(
        out.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid record")
}

fn f(row: &serde_json::Map<String, Value>, key: &str) -> f64 {
    as_f64(&row[key]).unwrap_or_else(|| panic!("{key} is not numeric in {row:?}"))
}

#[test]
fn volume_q1_anchor() {
    let r = json(&["volume", "--n", "3", "--p", "1", "--q", "1"]);
    assert_eq!(r.schema_version, "1");
    assert_eq!(r.results.len(), 1);
    let row = &r.results[0];
    assert_eq!(row["method"], "product-q1");
    assert!((f(row, "value") - 4.0 / 3.0).abs() < 1e-15);
    assert!(f(row, "error_bound") < 1e-14);
}

#[test]
fn volume_disc_uses_dirichlet() {
    let r = json(&["volume", "--n", "2", "--p", "2", "--q", "2"]);
    assert_eq!(r.results[0]["method"], "dirichlet");
    assert!((f(&r.results[0], "value") - std::f64::consts::PI).abs() < 1e-13);
}

#[test]
fn volume_monte_carlo_brackets_the_recursion() {
    let r = json(&[
        "volume",
        "--n",
        "3",
        "--p",
        "1",
        "--q",
        "inf",
        "--method",
        "mc",
        "--samples",
        "1000000",
        "--seed",
        "7",
    ]);
    let row = &r.results[0];
    assert_eq!(row["method"], "monte-carlo");
    assert_eq!(row["q"], "inf");
    assert_eq!(row["hits"].as_u64().map(|h| h > 100_000), Some(true));
    let exact = 98.0 / 27.0;
    assert!((f(row, "value") - exact).abs() <= f(row, "error_bound"));
}

#[test]
fn volume_grid_of_inputs() {
    let r = json(&["volume", "--n", "1,2", "--p", "1,inf", "--q", "inf"]);
    assert_eq!(r.results.len(), 4);
    assert_eq!(r.inputs["p"], serde_json::json!([1.0, "inf"]));
    // n = 2, p = inf: the square
    assert_eq!(f(&r.results[3], "value"), 4.0);
}

#[test]
fn default_table() {
    let r = json(&["table"]);
    assert_eq!(r.results.len(), 60);
    let maxima = r.metadata["maxima"].as_array().unwrap();
    assert_eq!(maxima.len(), 4);
    let p1 = maxima.iter().find(|m| m["p"] == 1.0).unwrap();
    assert_eq!(p1["argmax"], 4);
    let text = String::from_utf8(bin(&["table"]).stdout).unwrap();
    assert!(text.contains("3.697e+00"), "{text}");
    assert!(text.contains("p=0.5"));
}

#[test]
fn p2_table_peak() {
    let r = json(&["table", "--p-list", "2", "--n-max", "30"]);
    let m = &r.metadata["maxima"][0];
    // the recursion puts the peak at 17 (114.7920 against 114.4416 at 18)
    assert_eq!(m["argmax"], 17);
    assert!((f(&r.results[16], "value") - 114.791_950_842).abs() < 1e-8);
}

#[test]
fn one_row_table() {
    let out = String::from_utf8(bin(&["table", "--n-max", "1"]).stdout).unwrap();
    let row = out
        .lines()
        .find(|l| l.trim_start().starts_with("1 "))
        .unwrap();
    assert_eq!(row.matches("2.000e+00").count(), 4, "{out}");
}

#[test]
fn ratio_rows() {
    let r = json(&["ratio", "--p", "1", "--n-max", "10"]);
    assert_eq!(r.results.len(), 10);
    // the Dirichlet denominator is a double-precision log-Gamma value
    let n2 = &r.results[1];
    assert!((f(n2, "ratio") - 1.5).abs() <= 1.5 * f(n2, "rel_error"));
    assert!(f(n2, "rel_error") < 1e-13);
    for row in &r.results {
        assert!(f(row, "ratio") >= 1.0);
    }
    assert!(r.results[0]["lower_bound"].is_null());
    assert!(f(&r.results[3], "lower_bound") <= f(&r.results[3], "ratio"));
}

#[test]
fn log_law_sequence() {
    let r = json(&["asymptotics", "--p", "inf", "--q", "1", "--n-max", "200"]);
    assert_eq!(r.results.len(), 200);
    let norm: Vec<f64> = r.results.iter().map(|row| f(row, "normalized")).collect();
    let hi = norm.iter().cloned().fold(0.0, f64::max);
    let lo = norm.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi / lo < 4.0);
    assert_eq!(r.metadata["normalizer"], "log(n+1)");
}

#[test]
fn coding_family() {
    let r = json(&[
        "entropy",
        "--n",
        "64",
        "--construct",
        "--k",
        "4",
        "--seed",
        "1",
    ]);
    let row = &r.results[0];
    assert_eq!(row["certified"], true);
    assert!(row["sets"].as_u64().unwrap() >= 16);
    let sets = r.metadata["family"].as_array().unwrap();
    assert_eq!(sets.len() as u64, row["sets"].as_u64().unwrap());
    assert!(sets.iter().all(|s| s.as_array().unwrap().len() == 4));
}

#[test]
fn packing_family() {
    let r = json(&["entropy", "--n", "192", "--construct", "--mu", "1"]);
    let row = &r.results[0];
    assert_eq!(row["nu"], 2);
    assert_eq!(row["vectors"], 144);
    assert_eq!(row["weak_norm_ok"], true);
    assert_eq!(row["separation_ok"], true);
    assert!(f(row, "weak_norm_bound") <= 4.0 / 3.0);
}

#[test]
fn bound_curve_metadata() {
    let r = json(&["entropy", "--n", "8", "--k-max", "40"]);
    assert_eq!(r.results.len(), 40);
    assert_eq!(f(&r.results[0], "upper"), 1.0 + 8f64.ln());
    for key in ["c1", "c2", "gamma", "volume_ratio_root"] {
        assert!(r.metadata.contains_key(key), "{key}");
    }
    for row in &r.results {
        assert!(f(row, "lower") <= f(row, "upper"));
    }
}

#[test]
fn json_round_trips_values_bit_for_bit() {
    let out = bin(&[
        "volume", "--n", "7", "--p", "2", "--q", "inf", "--format", "json",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rec: OutputRecord = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&rec).unwrap() + "\n";
    assert_eq!(again, text);
    let lib = lorentz_volume::vol_ball(
        7,
        lorentz_volume::Params::weak(2.0).unwrap(),
        lorentz_volume::Method::Auto,
        &lorentz_volume::PrecisionContext::default(),
        &lorentz_volume::McConfig::default(),
    )
    .unwrap();
    assert_eq!(f(&rec.results[0], "value").to_bits(), lib.value.to_bits());
}

#[test]
fn csv_is_parseable_and_lossless() {
    let out = bin(&["ratio", "--p", "1", "--n-max", "5", "--format", "csv"]);
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rd.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "ratio").unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    let rec = json(&["ratio", "--p", "1", "--n-max", "5"]);
    for (row, j) in rows.iter().zip(&rec.results) {
        assert_eq!(row[col].parse::<f64>().unwrap(), f(j, "ratio"));
    }
}

#[test]
fn deterministic_output() {
    for args in [
        &[
            "volume",
            "--n",
            "4",
            "--p",
            "1",
            "--q",
            "2",
            "--samples",
            "20000",
            "--seed",
            "3",
            "--format",
            "csv",
        ][..],
        &[
            "entropy",
            "--n",
            "128",
            "--construct",
            "--k",
            "4",
            "--seed",
            "5",
            "--format",
            "json",
        ][..],
        &["table", "--n-max", "6", "--format", "json"][..],
    ] {
        assert_eq!(bin(args).stdout, bin(args).stdout, "{args:?}");
    }
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["volume", "--n", "0", "--p", "1", "--q", "1"][..],
        &["volume", "--n", "3", "--p", "abc", "--q", "1"][..],
        &["volume", "--n", "3", "--p", "-1", "--q", "1"][..],
        &[
            "volume", "--n", "3", "--p", "1", "--q", "1", "--method", "explicit",
        ][..],
        &[
            "volume", "--n", "30", "--p", "1", "--q", "2", "--method", "mc",
        ][..],
        &["ratio", "--p", "1", "--bits", "10"][..],
        &["entropy", "--n", "64", "--construct"][..],
    ] {
        assert_eq!(bin(args).status.code(), Some(EXIT_USAGE), "{args:?}");
    }
}

#[test]
fn strict_precision_exits_3() {
    let args = ["volume", "--n", "60", "--p", "100", "--q", "inf"];
    let run = |strict: bool| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_lorentzvol"));
        c.args(args)
            .args(["--format", "json"])
            .env("LORENTZVOL_BITS", "64");
        if strict {
            c.arg("--strict");
        }
        c.output().unwrap()
    };
    let relaxed = run(false);
    assert_eq!(relaxed.status.code(), Some(EXIT_OK));
    let rec: OutputRecord = serde_json::from_slice(&relaxed.stdout).unwrap();
    assert_eq!(rec.inputs["bits"], 64);
    assert_eq!(rec.results[0]["flagged"], true);
    assert!(!rec.warnings.is_empty());
    assert_eq!(run(true).status.code(), Some(EXIT_PRECISION));
    // enough bits clear the flag
    let ok = bin(&[
        "--strict", "--bits", "1024", "volume", "--n", "60", "--p", "100", "--q", "inf",
    ]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
}

#[test]
fn exhausted_construction_exits_4_with_partial_family() {
    let out = bin(&[
        "entropy",
        "--n",
        "256",
        "--construct",
        "--k",
        "8",
        "--budget",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_CONSTRUCTION));
    let rec: OutputRecord = serde_json::from_slice(&out.stdout).unwrap();
    let row = &rec.results[0];
    assert_eq!(row["certified"], false);
    assert_eq!(row["target"], 4096);
    assert!(row["sets"].as_u64().unwrap() < 4096);
    assert!(rec.warnings[0].contains("exhausted"));
}
