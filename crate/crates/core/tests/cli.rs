use std::fs;

use serde_json::Value;
use temporal_butterfly::cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};

fn tbc(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tbc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_g2(dir: &tempfile::TempDir) -> String {
    let path = dir.path().join("g2.txt");
    fs::write(&path, "% G2\nu1 l1 1\nu2 l1 2\nu1 l2 3\nu2 l2 4\nu2 l2 5\n").unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn exact_and_oracle_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_g2(&dir);
    let (code, out, _) = tbc(&["exact", "--input", &g, "--tau", "10"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["counts"], serde_json::json!([2, 0, 0, 0, 0, 0]));
    assert_eq!(v["total"], 2);
    let (_, oracle, _) = tbc(&["oracle", "--input", &g, "--tau", "10"]);
    assert_eq!(oracle, out);

    let (_, relabeled, _) = tbc(&["exact", "--input", &g, "--tau", "10s", "--relabel", "213456"]);
    let v: Value = serde_json::from_str(&relabeled).unwrap();
    assert_eq!(v["counts"], serde_json::json!([0, 2, 0, 0, 0, 0]));
    assert_eq!(v["labels"], "213456");
}

#[test]
fn estimate_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_g2(&dir);
    let (code, out, err) = tbc(&[
        "estimate", "--input", &g, "--tau", "10", "--method", "es", "--p", "0.5", "--seed", "3", "--runs", "10",
        "--with-exact",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["method"], "es");
    assert_eq!(v["exact"], serde_json::json!([2, 0, 0, 0, 0, 0]));
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 10);
    assert_eq!(runs[0]["seed"], 3);
    assert!(runs[0]["elapsed_ms"].is_null());
    assert_eq!(runs[0]["estimates"].as_array().unwrap().len(), 6);
    for key in ["mean", "mape", "rel_err", "variance"] {
        assert!(v["aggregates"].get(key).is_some());
    }

    let (_, timed, _) = tbc(&["estimate", "--input", &g, "--tau", "10", "--method", "is", "--s", "4", "--seed", "1", "--timing"]);
    let v: Value = serde_json::from_str(&timed).unwrap();
    assert!(v["runs"][0]["elapsed_ms"].is_number());
    assert!(v["exact"].is_null() && v["aggregates"]["mape"].is_null());

    let (_, csv, _) = tbc(&[
        "estimate", "--input", &g, "--tau", "10", "--method", "ns", "--p", "0.5", "--seed", "1", "--runs", "4",
        "--format", "csv",
    ]);
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn stats_sweep_bounds_gen() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_g2(&dir);
    let (_, stats, _) = tbc(&["stats", "--input", &g]);
    let v: Value = serde_json::from_str(&stats).unwrap();
    assert_eq!((v["m"].as_u64(), v["static_edge_count"].as_u64(), v["timespan"].as_i64()), (Some(5), Some(4), Some(4)));

    let (_, sweep, _) = tbc(&["sweep", "--input", &g, "--tau-list", "2,10"]);
    assert_eq!(sweep, "tau,B1,B2,B3,B4,B5,B6\n2,0,0,0,0,0,0\n10,2,0,0,0,0,0\n");

    let (_, bounds, _) = tbc(&["bounds", "--epsilon", "0.5", "--delta", "0.1", "--m", "101"]);
    let v: Value = serde_json::from_str(&bounds).unwrap();
    assert_eq!(v["min_interval_samples"], 2769);
    assert_eq!(v["chebyshev_interval_samples"], 4000);

    let out = dir.path().join("gen.txt");
    let (code, _, _) = tbc(&["gen", "--nu", "3", "--nl", "3", "--m", "25", "--timespan", "9", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 25);
    let (_, to_stdout, _) = tbc(&["gen", "--nu", "3", "--nl", "3", "--m", "25", "--timespan", "9", "--seed", "1"]);
    assert_eq!(to_stdout, fs::read_to_string(&out).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_g2(&dir);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "a b 1\na b\n").unwrap();
    let bad = bad.to_string_lossy().into_owned();

    assert_eq!(tbc(&["nonsense"]).0, EXIT_USAGE);
    assert_eq!(tbc(&["exact", "--input", &g]).0, EXIT_USAGE);
    assert_eq!(tbc(&["exact", "--input", &g, "--tau", "abc"]).0, EXIT_USAGE);
    assert_eq!(tbc(&["exact", "--input", &g, "--tau", "5", "--relabel", "111111"]).0, EXIT_USAGE);
    assert_eq!(tbc(&["estimate", "--input", &g, "--tau", "5", "--method", "es", "--seed", "1"]).0, EXIT_USAGE);
    assert_eq!(tbc(&["estimate", "--input", &g, "--tau", "5", "--method", "es", "--p", "2", "--seed", "1"]).0, EXIT_USAGE);
    assert_eq!(tbc(&["bounds", "--epsilon", "1.5", "--delta", "0.1"]).0, EXIT_USAGE);
    assert_eq!(tbc(&["oracle", "--input", &g, "--tau", "5", "--max-edges", "3"]).0, EXIT_USAGE);

    let (code, out, err) = tbc(&["exact", "--input", &bad, "--tau", "5"]);
    assert_eq!(code, EXIT_DATA);
    assert!(out.is_empty());
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(tbc(&["stats", "--input", "/nonexistent/graph.txt"]).0, EXIT_DATA);
    assert_eq!(tbc(&["--help"]).0, EXIT_OK);
}
