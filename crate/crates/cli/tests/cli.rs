//! End-to-end checks of the `lmph` binary: subcommand behavior, exit codes,
//! file formats, and byte-level reproducibility.

use std::fs;
use std::process::{Command, Output};

fn lmph(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmph"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tmpdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lmph-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn limit_emits_expected_json() {
    let dir = tmpdir("limit");
    let out = lmph(&["limit", "--k", "1", "--r", "1", "--s", "2"], &dir);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let bh = v["beta_hat"].as_f64().unwrap();
    assert!((bh - 0.015884).abs() < 1e-5, "beta_hat {bh}");
    assert!((v["q"].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    assert!(v["cdf"].as_f64().unwrap() > 0.0);
}

#[test]
fn limit_direct_family_parameters() {
    let dir = tmpdir("limit-qc");
    let out = lmph(&["limit", "--k", "1", "--q", "1", "--c", "4"], &dir);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["beta_hat"].is_null());
    assert!(v["alpha"].as_f64().unwrap() < 0.2);
    assert_eq!(v["alpha_prime"].as_f64().unwrap(), 1.0);
}

#[test]
fn limit_grid_csv() {
    let dir = tmpdir("grid");
    let out = lmph(
        &["limit", "--k", "1", "--r", "1", "--s", "2", "--grid-out", "grid.csv", "--grid-max", "2", "--grid-steps", "4"],
        &dir,
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.join("grid.csv")).unwrap();
    assert!(text.starts_with("r,s,beta_hat,cdf\n"));
    assert_eq!(text.lines().count(), 1 + 5 * 5);
}

#[test]
fn simulate_minimal_diagram_is_diagonal() {
    let dir = tmpdir("simulate");
    let out = lmph(&["simulate", "--n", "2", "--k", "1", "--seed", "1"], &dir);
    assert!(out.status.success());
    let diagram = fs::read_to_string(dir.join("diagram.txt")).unwrap();
    let lines: Vec<&str> = diagram.lines().collect();
    assert_eq!(lines[0], "2 1 1 1");
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split_whitespace().collect();
    assert_eq!(fields[0], fields[1], "single atom is on the diagonal");
    assert_eq!(fields[2], "1");

    let filtration = fs::read_to_string(dir.join("filtration.txt")).unwrap();
    assert!(filtration.starts_with("2 1 1\n1 2 "));
}

#[test]
fn simulate_outputs_are_reproducible() {
    let a = tmpdir("repro-a");
    let b = tmpdir("repro-b");
    for dir in [&a, &b] {
        let out = lmph(&["simulate", "--n", "9", "--k", "2", "--seed", "5"], dir);
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(a.join("filtration.txt")).unwrap(),
        fs::read(b.join("filtration.txt")).unwrap()
    );
    assert_eq!(fs::read(a.join("diagram.txt")).unwrap(), fs::read(b.join("diagram.txt")).unwrap());
}

#[test]
fn rank_reads_matrix_files() {
    let dir = tmpdir("rank");
    fs::write(dir.join("m.txt"), "2 2\n0 0 1\n1 0 1\n1 1 1\n").unwrap();
    let out = lmph(&["rank", "--input", "m.txt"], &dir);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["peel"]["removed_rank"], 2);
    assert_eq!(v["peel"]["residual_rows"], 0);
    assert_eq!(v["peel"]["certificate_ok"], true);
}

#[test]
fn compare_reports_schema_and_determinism() {
    let dir = tmpdir("compare");
    let args = [
        "compare", "--experiment", "betti", "--n", "40", "--k", "1", "--trials", "4",
        "--r", "1.0", "--s", "2.0", "--tolerance", "1.0", "--jobs", "2",
        "--per-trial-csv", "trials.csv",
    ];
    let out1 = lmph(&args, &dir);
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out1.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["entries"][0]["pass"], true);
    let out2 = lmph(&args, &dir);
    assert_eq!(out1.stdout, out2.stdout, "same argv and seed, same bytes");
    let csv = fs::read_to_string(dir.join("trials.csv")).unwrap();
    assert!(csv.starts_with("trial,label,value\n"));
    assert_eq!(csv.lines().count(), 1 + 4);
}

#[test]
fn compare_output_independent_of_job_count() {
    let dir = tmpdir("jobs");
    let base = ["compare", "--experiment", "diagonal", "--n", "30", "--trials", "6"];
    let mut one = base.to_vec();
    one.extend(["--jobs", "1"]);
    let mut four = base.to_vec();
    four.extend(["--jobs", "4"]);
    let a = lmph(&one, &dir);
    let b = lmph(&four, &dir);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "scheduling must not leak into reports");
}

#[test]
fn compare_text_format_renders_columns() {
    let dir = tmpdir("text");
    let out = lmph(
        &["compare", "--experiment", "tail", "--n", "20", "--trials", "3", "--u", "0,1", "--format", "text"],
        &dir,
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("label"));
    assert!(text.contains("tail_mass(u=0)"));
}

#[test]
fn gw_estimates_match_family_analysis() {
    let dir = tmpdir("gw");
    let out = lmph(
        &["gw", "--k", "1", "--q", "1", "--c", "4", "--pool", "20000", "--iters", "100", "--init", "zeros"],
        &dir,
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let alpha = v["alpha"].as_f64().unwrap();
    assert!((v["t_est"].as_f64().unwrap() - alpha).abs() < 0.02);
    assert!((v["eta_est"].as_f64().unwrap() - v["lambda_at_alpha"].as_f64().unwrap()).abs() < 0.02);
}

#[test]
fn census_lines_sorted_by_frequency() {
    let dir = tmpdir("census");
    let out = lmph(
        &["census", "--source", "gw", "--k", "1", "--r", "0.7", "--s", "2", "--trees", "5000"],
        &dir,
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let freqs: Vec<f64> = text
        .lines()
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect();
    assert!(!freqs.is_empty());
    assert!(freqs.windows(2).all(|w| w[0] >= w[1]));
    let total: f64 = freqs.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn census_mn_and_gw_agree_roughly() {
    let dir = tmpdir("census2");
    let parse = |out: Output| -> std::collections::HashMap<String, f64> {
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .map(|l| {
                let (key, freq) = l.rsplit_once(' ').unwrap();
                (key.to_string(), freq.parse().unwrap())
            })
            .collect()
    };
    let mn = lmph(
        &["census", "--source", "mn", "--n", "500", "--k", "1", "--r", "0.7", "--s", "2"],
        &dir,
    );
    assert!(mn.status.success());
    let gw = lmph(
        &["census", "--source", "gw", "--k", "1", "--r", "0.7", "--s", "2", "--trees", "20000"],
        &dir,
    );
    assert!(gw.status.success());
    let (a, b) = (parse(mn), parse(gw));
    let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let tv: f64 = keys
        .iter()
        .map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0;
    // one small-n instance against the tree census: loose agreement only
    assert!(tv < 0.2, "TV {tv}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tmpdir("usage");
    // unknown flag
    assert_eq!(lmph(&["limit", "--bogus"], &dir).status.code(), Some(2));
    // missing required argument
    assert_eq!(lmph(&["simulate"], &dir).status.code(), Some(2));
    // domain violation surfaces as usage error
    assert_eq!(lmph(&["simulate", "--n", "1", "--k", "1"], &dir).status.code(), Some(2));
    // undersized population pool
    assert_eq!(
        lmph(&["gw", "--k", "1", "--q", "1", "--c", "2", "--pool", "10"], &dir).status.code(),
        Some(2)
    );
    // malformed observable
    assert_eq!(
        lmph(
            &["compare", "--experiment", "observable", "--n", "10", "--trials", "1", "--obs", "sin(s)"],
            &dir
        )
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn every_subcommand_has_help() {
    let dir = tmpdir("help");
    for sub in ["simulate", "limit", "compare", "rank", "gw", "census"] {
        let out = lmph(&[sub, "--help"], &dir);
        assert!(out.status.success(), "{sub} --help");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn filtration_dump_roundtrips_through_rank() {
    // simulate, then feed the dumped window matrix back through rank --input
    let dir = tmpdir("roundtrip");
    let out = lmph(&["rank", "--n", "30", "--k", "1", "--r", "0.5", "--s", "2.0", "--seed", "9"], &dir);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let removed = v["peel"]["removed_rank"].as_u64().unwrap();
    let residual = v["peel"]["residual_rank"].as_u64().unwrap();
    assert_eq!(removed + residual, v["rank"].as_u64().unwrap());
}
