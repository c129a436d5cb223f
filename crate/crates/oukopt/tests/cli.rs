use std::path::Path;
use std::process::{Command, Output};

use oukopt_core::fim::fim_entries_1d;
use oukopt_core::search::two_point_k_optimal;
use oukopt_core::{Design1D, OuParams};
use serde_json::Value;

fn oukopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oukopt"))
        .args(args)
        .env_remove("OUKOPT_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = oukopt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Header row and data rows of a CSV output, skipping comment lines.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let split = |l: &str| l.split(',').map(str::to_owned).collect::<Vec<_>>();
    let header = split(lines.next().unwrap());
    (header, lines.map(split).collect())
}

fn field(header: &[String], row: &[String], name: &str) -> String {
    row[header.iter().position(|h| h == name).unwrap()].clone()
}

fn num(header: &[String], row: &[String], name: &str) -> f64 {
    field(header, row, name).parse().unwrap()
}

fn quantity(text: &str, name: &str) -> f64 {
    let (_, rows) = csv_rows(text);
    rows.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn fim_line_matches_the_library() {
    let text = stdout(&["fim", "--model", "process", "--beta", "1", "--design", "0,0.5,1"]);
    let e = fim_entries_1d(&OuParams::with_beta(1.0).unwrap(), &Design1D::new(vec![0.0, 0.5, 1.0]).unwrap()).unwrap();
    for (name, want) in [("L1", e.l1), ("L2", e.l2), ("L3", e.l3), ("F01", e.l2), ("det", e.det())] {
        assert!(close(quantity(&text, name), want, 1e-11), "{name}");
    }
}

#[test]
fn fim_grid_is_three_by_three() {
    let text = stdout(&["fim", "--model", "sheet", "--beta", "1", "--gamma", "2", "--grid", "0,1x0,1"]);
    let (_, rows) = csv_rows(&text);
    let entries: Vec<&str> = rows.iter().map(|r| r[0].as_str()).filter(|n| n.starts_with('F')).collect();
    assert_eq!(entries.len(), 9);
    assert!(close(quantity(&text, "F01"), quantity(&text, "F10"), 0.0));
    // det of the Kronecker product factorises over the axes
    let (l1, l2, l3) = (quantity(&text, "L1"), quantity(&text, "L2"), quantity(&text, "L3"));
    let (m1, m2, m3) = (quantity(&text, "M1"), quantity(&text, "M2"), quantity(&text, "M3"));
    let det = l1 * (l1 * l3 - l2 * l2) * m1 * (m1 * m3 - m2 * m2);
    assert!(close(quantity(&text, "det"), det, 1e-9));
}

#[test]
fn validation_errors_exit_2() {
    let out = oukopt(&["fim", "--model", "process", "--beta", "1", "--design", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    for args in [
        &["fim", "--model", "process", "--beta", "-1", "--design", "0,1"][..],
        &["fim", "--model", "sheet", "--beta", "1", "--grid", "0,1x0,1"],
        &["optimize", "two-point", "--beta", "1", "--criterion", "D"],
        &["optimize", "equidistant", "--beta", "1"],
        &["simulate", "eff", "--beta", "1", "--reps", "0"],
        &["asymptotics", "limits"],
        // clap usage errors share the code
        &["optimize", "three-point"],
        &["fim", "--model", "process", "--beta", "1", "--design", "0,x"],
    ] {
        assert_eq!(oukopt(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn error_json_on_demand() {
    let out = oukopt(&["fim", "--model", "process", "--beta", "1", "--design", "0,0", "--error-json"]);
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["kind"], "validation");
    assert_eq!(v["exit_code"], 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn numerical_errors_exit_3() {
    let out = oukopt(&["fim", "--model", "process", "--beta", "1e-300", "--design", "0,1e-300,1", "--error-json"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["kind"], "numerical");
    let grid = ["fim", "--model", "sheet", "--beta", "1", "--gamma", "1e-300", "--grid", "0,1x0,1e-10"];
    assert_eq!(oukopt(&grid).status.code(), Some(3));
}

#[test]
fn optimize_reports_collapse_with_a_status() {
    let (h, rows) = csv_rows(&stdout(&["optimize", "three-point", "--beta", "50", "--criterion", "K"]));
    assert_eq!(field(&h, &rows[0], "status"), "optimal");
    assert_eq!(field(&h, &rows[0], "collapsed_d"), "false");
    assert!(num(&h, &rows[0], "d_opt") > 0.0);

    let out = oukopt(&["optimize", "three-point", "--beta", "2", "--criterion", "K"]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(field(&h, &rows[0], "status"), "collapsed");
    assert_eq!(field(&h, &rows[0], "collapsed_d"), "true");
}

#[test]
fn two_point_root_matches_the_library() {
    let (h, rows) = csv_rows(&stdout(&["optimize", "two-point", "--beta", "0.1"]));
    let want = two_point_k_optimal(&OuParams::with_beta(0.1).unwrap(), 1e-10).unwrap().argopt[0];
    assert!(close(num(&h, &rows[0], "d_opt"), want, 1e-11));
}

#[test]
fn equidistant_and_grid_families() {
    let (h, rows) = csv_rows(&stdout(&["optimize", "equidistant", "--beta", "1", "--n", "5"]));
    assert_eq!(field(&h, &rows[0], "status"), "optimal");
    assert_eq!(field(&h, &rows[0], "n"), "5");
    let (h, rows) = csv_rows(&stdout(&["optimize", "four-point", "--beta", "0.2", "--gamma", "0.3"]));
    assert!((num(&h, &rows[0], "d_opt") - 0.307881).abs() < 1e-5);
    assert!((num(&h, &rows[0], "delta_opt") - 0.461310).abs() < 1e-5);
    let (h, rows) = csv_rows(&stdout(&["optimize", "nine-point", "--beta", "1", "--gamma", "2", "--criterion", "D"]));
    assert!((num(&h, &rows[0], "d_opt") - 0.5).abs() < 1e-6);
}

#[test]
fn asymptotic_limits_and_doubling() {
    let (h, rows) = csv_rows(&stdout(&["asymptotics", "limits", "--beta", "1"]));
    assert!(close(num(&h, &rows[0], "limit_d"), 16.0 * 2.0 * 7.0 / (3.0 * 19.0), 1e-11));
    assert!(close(num(&h, &rows[0], "limit_d_tilde"), 16.0 * 2.0 * 7.0 / (3.0 * 19.0) * 4.0 / 3.0, 1e-11));

    let (h, rows) = csv_rows(&stdout(&["asymptotics", "double", "--mode", "domain", "--beta", "1", "--n", "1000"]));
    assert!((num(&h, &rows[0], "ratio_d") - num(&h, &rows[0], "limit_d")).abs() < 1e-2);

    let (_, rows) = csv_rows(&stdout(&["asymptotics", "limits", "--range", "0.01,100,9"]));
    assert_eq!(rows.len(), 9);

    let (h, rows) = csv_rows(&stdout(&["asymptotics", "k-maximum"]));
    assert!((num(&h, &rows[0], "beta") - 0.2730).abs() < 1e-3);
}

#[test]
fn surface_and_curves_shapes() {
    let (h, rows) = csv_rows(&stdout(&["asymptotics", "surface", "--mode", "both", "--axis", "0.1,10,4"]));
    assert_eq!(rows.len(), 16);
    assert_eq!(h, ["beta", "gamma", "estimate", "error", "converged"]);
    let (_, rows) = csv_rows(&stdout(&["asymptotics", "surface", "--mode", "both"]));
    assert_eq!(rows.len(), 40 * 40);

    let (h, rows) = csv_rows(&stdout(&["asymptotics", "curves", "--family", "three-point", "--range", "0.1,10,7"]));
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().any(|r| field(&h, r, "status") == "collapsed"));
    let (_, rows) = csv_rows(&stdout(&["asymptotics", "curves", "--family", "four-point", "--range", "0.1,10,3"]));
    assert_eq!(rows.len(), 9);
}

#[test]
fn efficiency_at_the_table_corner() {
    let (h, rows) = csv_rows(&stdout(&["simulate", "eff", "--beta", "10", "--gamma", "10", "--reps", "10000"]));
    let eff = num(&h, &rows[0], "eff");
    assert!((eff - 115.33).abs() <= 3.0, "{eff}");

    let out = oukopt(&["simulate", "eff", "--beta", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(field(&h, &rows[0], "status"), "collapsed");
    assert_eq!(field(&h, &rows[0], "eff"), "");
}

#[test]
fn table1_has_both_blocks() {
    let (h, rows) = csv_rows(&stdout(&["simulate", "table1", "--reps", "2000", "--seed", "7"]));
    assert_eq!(rows.len(), 50);
    assert_eq!(rows.iter().filter(|r| field(&h, r, "block") == "small").count(), 25);
    assert!(rows.iter().any(|r| field(&h, r, "status") == "collapsed-merged"));
    assert!(rows.iter().all(|r| num(&h, r, "eff").is_finite()));
}

#[test]
fn curve_rows_follow_the_interval() {
    let (h, rows) = csv_rows(&stdout(&["simulate", "curve", "--interval", "upper", "--reps", "500", "--count", "5"]));
    assert_eq!(rows.len(), 5);
    assert!((num(&h, &rows[4], "beta") - 100.0).abs() < 1e-9);
    assert!(rows.iter().all(|r| field(&h, r, "status") == "ok"));
}

#[test]
fn header_echoes_spec_seed_and_tolerances() {
    let text = stdout(&["simulate", "eff", "--beta", "0.3", "--reps", "200", "--seed", "11", "--tol", "1e-9"]);
    let meta: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(meta[0].starts_with("# tool: \"oukopt "));
    let spec: Value = serde_json::from_str(meta[1].strip_prefix("# spec: ").unwrap()).unwrap();
    assert_eq!(spec["command"], "simulate eff");
    assert_eq!(spec["mc"]["replicates"], 200);
    assert_eq!(spec["mc"]["sigma"], 0.25);
    assert_eq!(meta[2], "# seed: 11");
    let tol: Value = serde_json::from_str(meta[3].strip_prefix("# tolerances: ").unwrap()).unwrap();
    assert_eq!(tol["refine"], 1e-9);
}

#[test]
fn json_output_is_structured() {
    let text = stdout(&["optimize", "three-point", "--beta", "1", "--criterion", "D", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["spec"]["family"], "three-point");
    assert_eq!(v["seed"], Value::Null);
    let cols: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let row = v["rows"][0].as_array().unwrap();
    assert_eq!(row[cols.iter().position(|&c| c == "d_opt").unwrap()], 0.5);
    assert_eq!(row[cols.iter().position(|&c| c == "gamma").unwrap()], Value::Null);
}

#[test]
fn numbers_have_at_most_twelve_significant_digits() {
    let text = stdout(&["simulate", "table1", "--reps", "300"]);
    let (_, rows) = csv_rows(&text);
    for cell in rows.iter().flatten() {
        if cell.parse::<f64>().is_ok() && !cell.contains("true") {
            let mantissa = cell.split(['e', 'E']).next().unwrap();
            let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
            assert!(digits.trim_start_matches('0').len() <= 12, "{cell}");
        }
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let args = ["simulate", "table1", "--reps", "500", "--seed", "3"];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_oukopt"))
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .env_remove("OUKOPT_OUTPUT_DIR")
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("4"));
}

fn write_into(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oukopt"))
        .args(args)
        .env("OUKOPT_OUTPUT_DIR", dir)
        .output()
        .unwrap()
}

#[test]
fn output_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = write_into(dir.path(), &["optimize", "two-point", "--beta", "1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("optimize-two-point.csv")).unwrap();
    assert!(text.contains("two-point,K,1,"));

    let out = write_into(dir.path(), &["asymptotics", "k-maximum", "--format", "json"]);
    assert!(out.status.success());
    assert!(dir.path().join("asymptotics-k-maximum.json").exists());

    // an explicit path wins over the environment
    let file = dir.path().join("nested").join("limits.csv");
    let out = write_into(dir.path(), &["asymptotics", "limits", "--beta", "2", "-o", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(file.exists());
    assert!(!dir.path().join("asymptotics-limits.csv").exists());
}

#[test]
fn identical_specs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = oukopt(&["simulate", "curve", "--interval", "lower", "--count", "4", "--reps", "300", "--format", "json", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
