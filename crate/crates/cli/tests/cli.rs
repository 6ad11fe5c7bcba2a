//! End-to-end tests against the compiled binary: exit codes, output shapes,
//! determinism, and the documented examples.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trace-moments"));
    // Keep test output independent of the ambient environment.
    c.env_remove("TRACE_MOMENTS_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn sample_rows_and_determinism() {
    let args = [
        "sample",
        "--n",
        "4",
        "--beta",
        "1",
        "--samples",
        "1000",
        "--seed",
        "7",
        "--sampler",
        "tridiagonal",
        "--format",
        "csv",
    ];
    let a = run(&args);
    assert!(a.status.success());
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t1,t2");
    assert_eq!(lines.count(), 1000);

    let b = run(&args);
    assert_eq!(a.stdout, b.stdout, "same flags, same bytes");
}

#[test]
fn invalid_beta_exits_two_with_named_error() {
    let out = run(&["sample", "--n", "4", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NonPositiveBeta"));
}

#[test]
fn unknown_flag_exits_two() {
    let out = run(&["sample", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_env_fallback_and_flag_precedence() {
    let flag = run(&["sample", "--n", "3", "--beta", "2", "--samples", "5", "--seed", "7"]);
    let env = bin()
        .args(["sample", "--n", "3", "--beta", "2", "--samples", "5"])
        .env("TRACE_MOMENTS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);

    // An explicit flag beats the environment.
    let both = bin()
        .args(["sample", "--n", "3", "--beta", "2", "--samples", "5", "--seed", "7"])
        .env("TRACE_MOMENTS_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, both.stdout);

    let bad_env = bin()
        .args(["sample", "--n", "3", "--beta", "2", "--samples", "5"])
        .env("TRACE_MOMENTS_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn density_point_examples() {
    let out = run(&[
        "density", "--n", "2", "--beta", "1", "--point", "0,1", "--point", "3,1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t1,t2,log_q");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cols[..2], &["0", "1"]);
    let expected = -0.5 - (4.0 * std::f64::consts::PI.sqrt()).ln();
    let got: f64 = cols[2].parse().unwrap();
    assert!((got - expected).abs() <= 1e-12);
    // (3, 1) sits below the parabola t2 = t1^2/2.
    assert_eq!(lines[2], "3,1,-inf");
}

#[test]
fn density_grid_row_count() {
    let out = run(&[
        "density",
        "--n",
        "3",
        "--beta",
        "2",
        "--grid-t1",
        "-2:2:5",
        "--grid-t2",
        "1:9:4",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 5 * 4);

    let missing = run(&["density", "--n", "3", "--beta", "2", "--grid-t1", "-2:2:5"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn density_json_renders_neg_infinity_as_string() {
    let out = run(&[
        "density", "--n", "2", "--beta", "1", "--point", "3,1", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(v["log_q"], serde_json::json!("-inf"));
}

#[test]
fn moments_examples() {
    let out = run(&["moments", "--n", "4", "--beta", "1", "--k", "0", "--nn", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "k,n,value\n0,1,10\n");

    let unit = run(&["moments"]);
    assert_eq!(stdout(&unit), "k,n,value\n0,0,1\n");
}

#[test]
fn verify_guards_and_passes() {
    let guard = run(&["verify", "--n", "1", "--beta", "1"]);
    assert_eq!(guard.status.code(), Some(2));
    assert!(stderr(&guard).contains("InvalidExponent"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reports.json");
    let ok = run(&[
        "verify",
        "--n",
        "2",
        "--beta",
        "2",
        "--samples",
        "2000",
        "--seed",
        "3",
        "--sampler",
        "exact",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(ok.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut n_reports = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], serde_json::json!(true), "{line}");
        n_reports += 1;
    }
    assert_eq!(n_reports, 11);

    let too_few = run(&["verify", "--n", "2", "--beta", "2", "--samples", "10"]);
    assert_eq!(too_few.status.code(), Some(2));
}

#[test]
fn bounds_examples() {
    // Traces of the spectrum {1, 2}.
    let ok = run(&["bounds", "--traces", "3,5"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = stdout(&ok);
    assert!(text.starts_with("name,lhs,rhs,satisfied,equality\n"));
    assert!(text.contains("t1^2 <= N*t2,9,10,true,false"));

    let bad = run(&["bounds", "--traces", "0,-1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("false"));

    // Degenerate spectrum {1, 1}: equality flagged.
    let eq = run(&["bounds", "--n", "2", "--traces", "2,2,2,2"]);
    assert_eq!(eq.status.code(), Some(0));
    assert!(stdout(&eq).contains("true,true"));

    let garbage = run(&["bounds", "--traces", "1,spam"]);
    assert_eq!(garbage.status.code(), Some(2));

    let neither = run(&["bounds"]);
    assert_eq!(neither.status.code(), Some(2));
}

#[test]
fn bounds_reads_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traces.txt");
    std::fs::write(&path, "3 5\n").unwrap();
    let out = run(&["bounds", "--traces-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("t1^2 <= N*t2,9,10,true,false"));
}

#[test]
fn standardize_example() {
    // Traces of {0, 1, 2}: delta = 1, c = sqrt(2).
    let out = run(&["standardize", "--n", "3", "--traces", "3,5,9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "delta,c,t1,t2,t3");
    let row = lines.next().unwrap();
    assert!(row.starts_with("1,1.4142135623730951,"));
}

#[test]
fn plot_script_replaces_rows() {
    let out = run(&[
        "sample",
        "--n",
        "4",
        "--beta",
        "2",
        "--samples",
        "500",
        "--seed",
        "1",
        "--plot-script",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gnuplot"));
    assert!(text.contains("$t1_hist << EOD"));
    assert!(text.contains("$t2_pdf << EOD"));
    assert!(text.contains("plot $t1_hist"));
    assert!(!text.contains("t1,t2\n"));
}

#[test]
fn exact_sampler_trace_depth_is_guarded() {
    let out = run(&["sample", "--sampler", "exact", "--r-max", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let ok = run(&["sample", "--sampler", "exact", "--r-max", "2", "--samples", "3"]);
    assert!(ok.status.success());
}
