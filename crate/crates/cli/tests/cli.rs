use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn helgason(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helgason")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&helgason(&[])), 2);
    assert_eq!(code(&helgason(&["verify", "--suite", "bogus"])), 2);
    assert_eq!(code(&helgason(&["table", "phi", "--d", "1"])), 2);
    assert_eq!(code(&helgason(&["table", "c-function", "--config", "/nonexistent/config.json"])), 2);
    assert_eq!(code(&helgason(&["--help"])), 0);
}

#[test]
fn c_function_table_has_the_density_column() {
    let o = helgason(&["table", "c-function", "--d", "3", "--lambda", "1,2,4"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["d", "lambda", "c_re", "c_im", "c_abs", "density"]);
    let dens: Vec<f64> = rdr.records().map(|r| r.unwrap()[5].parse().unwrap()).collect();
    for (got, want) in dens.iter().zip([1.0, 4.0, 16.0]) {
        assert!((got / want - 1.0).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn tables_are_byte_identical_across_runs() {
    for kind in ["c-function", "phi", "exponents"] {
        let a = helgason(&["table", kind, "--d", "2,3", "--lambda", "0.5,3,17"]);
        let b = helgason(&["table", kind, "--d", "2,3", "--lambda", "0.5,3,17"]);
        assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{kind}");
    }
}

#[test]
fn report_schema_and_config_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let o = helgason(&["verify", "--suite", "resolvent", "--d", "2", "--seed", "11", "--out", path_arg(&first)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&first).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    for key in ["version", "config_echo", "records", "summary"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let records = report["records"].as_array().unwrap();
    assert_eq!(report["summary"]["passed"].as_u64().unwrap() as usize, records.len());
    assert_eq!(report["summary"]["failed"].as_u64().unwrap(), 0);
    assert!(report["summary"]["wall_time_s"].is_number());
    let ids: Vec<&str> = records.iter().map(|r| r["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    // The echoed config reproduces the run byte for byte.
    let config = dir.path().join("config.json");
    fs::write(&config, serde_json::to_string(&report["config_echo"]).unwrap()).unwrap();
    let second = dir.path().join("second.json");
    let o = helgason(&["verify", "--suite", "resolvent", "--config", path_arg(&config), "--out", path_arg(&second)]);
    assert_eq!(code(&o), 0);
    assert_eq!(text, fs::read_to_string(&second).unwrap());
}

#[test]
fn projector_suite_in_three_dimensions_has_six_records() {
    let o = helgason(&["verify", "--suite", "projector", "--d", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 6);
}

#[test]
fn failing_checks_exit_with_one() {
    // No fitted exponent lands within 1e-9 of its prediction.
    let o = helgason(&["verify", "--suite", "smallfreq", "--d", "3", "--tolerance", "1e-9"]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn malformed_csv_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    fs::write(&input, "lambda,value\n8,1.0\n16,2.0\n32,oops\n").unwrap();
    let o = helgason(&["plot", "loglog", path_arg(&input), "--slope", "1"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn loglog_of_a_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("points.csv");
    fs::write(&input, "lambda,value,predicted\n8,64,2\n16,256,2\n32,1024,2\n").unwrap();
    let out = dir.path().join("plots/loglog.svg");
    let o = helgason(&["plot", "loglog", path_arg(&input), "--out", path_arg(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = fs::read_to_string(&out).unwrap();
    let attr = |name: &str| -> f64 {
        let start = svg.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        svg[start..].split('"').next().unwrap().parse().unwrap()
    };
    assert!((attr("data-fitted-slope") - attr("data-reference-slope")).abs() < 1e-12);
}

#[test]
fn region_diagrams_carry_the_caption_lines() {
    let o = helgason(&["plot", "region-diagram", "--figure", "2"]);
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.contains("Green line: 1/q - 1/s = 1/d"));
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}
