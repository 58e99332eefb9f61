use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup-ratio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let v: Value = serde_json::from_str(&stdout(args)).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn construct_then_count_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("d23.txt");
    let doc = dir.path().join("d23.json");
    stdout(&["construct", "--k", "2", "--ell", "3", "--out", edges.to_str().unwrap()]);
    stdout(&["construct", "--k", "2", "--ell", "3", "--format", "json", "--out", doc.to_str().unwrap()]);
    assert!(fs::read_to_string(&edges).unwrap().starts_with("6 12\n"));

    for (file, method) in [(&edges, "brute"), (&edges, "permanent"), (&doc, "brute"), (&doc, "layered")] {
        let v = json(&["count", "--in", file.to_str().unwrap(), "--method", method]);
        assert_eq!(v["derangements"], "8", "{method}");
        assert_eq!(v["permutations"], "17", "{method}");
        assert_eq!(v["n"], 6);
    }
}

#[test]
fn layered_count_needs_parts() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    fs::write(&edges, stdout(&["construct", "--k", "2", "--ell", "2"])).unwrap();
    let out = cli(&["count", "--in", edges.to_str().unwrap(), "--method", "layered"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_reports_a_root() {
    let v = json(&["solve", "--r", "0.3"]);
    assert_eq!(v["ell"], 2);
    let p = v["p"].as_f64().unwrap();
    assert!((p - 0.79455).abs() < 1e-5);

    let v = json(&["solve", "--r", "0.3", "--k", "8"]);
    assert_eq!(v["m"], 102);
}

#[test]
fn bad_ratio_is_rejected() {
    assert_eq!(cli(&["solve", "--r", "0.7"]).status.code(), Some(2));
}

#[test]
fn expect_small_case() {
    let v = json(&["expect", "--k", "2", "--ell", "2", "--m", "6"]);
    assert_eq!(v["ex"], "6/7");
    assert_eq!(v["ey"], "4");
    assert_eq!(v["ex2"], "8/7");

    let csv = stdout(&["expect", "--k", "2", "--ell", "2", "--m", "6", "--format", "csv"]);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("r,k,ell,p,m,"));
    assert!(lines[1].contains(",2,2,0.75,6,"));
}

#[test]
fn mc_writes_trial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trials.csv");
    let args = ["mc", "--r", "0.3", "--k", "4", "--trials", "20", "--seed", "5", "--csv", path.to_str().unwrap()];
    let v = json(&args);
    assert_eq!(v["trials"], 20);
    assert_eq!(v["per_trial"].as_array().unwrap().len(), 20);

    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,seed,x,y,ratio"));
    assert_eq!(lines.count(), 20);

    // same seed, same bytes
    assert_eq!(json(&args), v);
    assert_eq!(fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn sweep_emits_one_row_per_k() {
    let csv = stdout(&["sweep", "--r", "0.3", "--k-list", "6,4,6", "--trials", "5"]);
    let rows: Vec<_> = csv.lines().collect();
    assert_eq!(rows[0], "k,ell,p,m,exact_ratio,abs_error,x_concentration,empirical_mean_ratio");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("4,2,"));
    assert!(rows[2].starts_with("6,2,"));
    assert!(!rows[2].ends_with(','));
}

#[test]
fn verify_tiny_passes() {
    let v = json(&["verify", "--profile", "tiny", "--json"]);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
}
