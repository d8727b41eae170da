//! End-to-end checks of the binary contract: exit codes, config-file
//! layering, stdout CSV, and the JSON summary sidecar.

use std::fs;
use std::io::Write;
use std::process::{Command, Output};

fn diffset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffset")).args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn success_exits_zero_with_csv_on_stdout() {
    let out = diffset(&["census", "--p", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(stdout.starts_with("# command = census\n"));
    assert!(stdout.contains("\nr,count,bound,ratio\n"));
    assert!(stdout.ends_with("\n"));
    // Status and summary go to stderr, never into the CSV stream.
    assert!(stderr_of(&out).contains("census: 3 rows"));
}

#[test]
fn missing_seed_is_input_error() {
    let out = diffset(&["adversary", "--p", "3", "--n", "4", "--K", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--seed is required for adversary"));
}

#[test]
fn even_or_composite_modulus_is_input_error() {
    for p in ["2", "9"] {
        let out = diffset(&["census", "--p", p, "--n", "2"]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr_of(&out).contains("odd prime"));
    }
}

#[test]
fn malformed_model_is_input_error() {
    let out = diffset(&[
        "concentration",
        "--model",
        "gamma:c=10",
        "--N",
        "64",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_overrun_is_resource_error() {
    let out = diffset(&["census", "--p", "3", "--n", "4", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("exceeds the budget"));
    let out = diffset(&["gauss-sum", "--p", "3", "--n", "9", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_set_file_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.txt");
    fs::write(&path, "1\n2\nbanana\n").unwrap();
    let out = diffset(&[
        "dual",
        "--domain",
        "interval",
        "--N",
        "10",
        "--set",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn out_of_range_set_element_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.txt");
    fs::write(&path, "5\n11\n").unwrap();
    let out = diffset(&[
        "dual",
        "--domain",
        "cyclic",
        "--N",
        "10",
        "--set",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_values_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    let mut f = fs::File::create(&config).unwrap();
    writeln!(f, "# experiment defaults").unwrap();
    writeln!(f, "p = 3").unwrap();
    writeln!(f, "n = 2").unwrap();
    writeln!(f, "trials = 7").unwrap();
    writeln!(f, "seed = 5").unwrap();
    drop(f);

    // Config alone supplies everything.
    let out = diffset(&[
        "adversary",
        "--K",
        "2",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("# trials = 7\n"));
    assert!(stdout.contains("# seed = 5\n"));

    // A CLI flag overrides the config value.
    let out = diffset(&[
        "adversary",
        "--K",
        "2",
        "--trials",
        "3",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("# trials = 3\n"));
    assert_eq!(stdout.lines().filter(|l| !l.starts_with('#')).count() - 1, 3);
}

#[test]
fn unknown_config_key_is_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "p = 3\nwidgets = 4\n").unwrap();
    let out = diffset(&["census", "--n", "2", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("line 2") && err.contains("widgets"), "stderr: {err}");
}

#[test]
fn out_flag_writes_csv_and_json_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("run.csv");
    let out = diffset(&[
        "gauss-sum",
        "--p",
        "3",
        "--n",
        "1",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(out.stdout.is_empty(), "CSV must go to the file, not stdout");

    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("# command = gauss-sum\n"));
    assert!(csv.contains("form,rank,computed,predicted,deviation\n"));

    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(sidecar["command"], "gauss-sum");
    assert_eq!(sidecar["rows"], 3);
    assert_eq!(sidecar["config"]["p"], "3");
    assert!(sidecar["summary"]["max_deviation"].as_f64().unwrap() < 1e-9);
    assert!(sidecar["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn dual_inner_product_against_difference_set() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("a.txt");
    let diffs = dir.path().join("s.txt");
    // A = {0,1,2,3} in Z_8; S = {4}: F(4) counts x with x, x+4, x+8 in A.
    fs::write(&set, "0\n1\n2\n3\n").unwrap();
    fs::write(&diffs, "4\n").unwrap();
    let out = diffset(&[
        "dual",
        "--domain",
        "cyclic",
        "--N",
        "8",
        "--k",
        "2",
        "--set",
        set.to_str().unwrap(),
        "--diffs",
        diffs.to_str().unwrap(),
        "--out",
        dir.path().join("dual.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dual.json")).unwrap()).unwrap();
    // F^(2)(4) = |A ∩ (A−4)|/8 = 0; the inner product with 1_S picks it out
    // against the domain average: (1/8) Σ_{d∈S} F(d) = 0.
    assert_eq!(sidecar["summary"]["inner"], "0/1");
}

#[test]
fn vector_domain_dual_respects_budget() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("a.txt");
    fs::write(&set, "0\n").unwrap();
    let out = diffset(&[
        "dual",
        "--domain",
        "vector",
        "--p",
        "3",
        "--n",
        "20",
        "--set",
        set.to_str().unwrap(),
        "--budget",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));
}

#[test]
fn fixed_size_model_on_cyclic_schedule_is_rejected() {
    let out = diffset(&[
        "concentration",
        "--model",
        "fixed:K=8",
        "--N",
        "64,128",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}
