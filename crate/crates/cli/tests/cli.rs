//! End-to-end tests of the binary: flags, exit codes, file outputs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pingpong-qkd"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sweep"));
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--scenario",
        "case1",
        "--gamma",
        "0.1",
        "--gamma",
        "4",
        "--points",
        "5",
        "--t-max",
        "1",
        "--out",
        "a.csv",
    ];
    assert_eq!(run(&args, dir.path()).status.code(), Some(0));
    let mut second = args;
    second[second.len() - 1] = "b.csv";
    assert_eq!(run(&second, dir.path()).status.code(), Some(0));

    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "identical configs must produce identical bytes");

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,gt,gamma,lambda,i_ab,i_ae,chi_ae,chi_ab,k_min,k_max"
    );
    assert_eq!(lines.count(), 10, "5 points for each of 2 gammas");
    assert!(!text.contains('\r'));

    // First row sits at gt = 0: no damping, vanishing key rate.
    let first = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = first.split(',').collect();
    assert_eq!(fields[0], "case1");
    let lambda: f64 = fields[3].parse().unwrap();
    let k_max: f64 = fields[9].parse().unwrap();
    assert!(lambda.abs() < 1e-12);
    assert!(k_max.abs() < 1e-9);
}

#[test]
fn sweep_rejects_unsupported_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep", "--scenario", "noiseless"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_scenario_value_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table", "--scenario", "case3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_path_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sweep",
            "--scenario",
            "case1",
            "--gamma",
            "0.1",
            "--points",
            "2",
            "--out",
            "/nonexistent-dir/sweep.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_noiseless_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table", "--scenario", "noiseless"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("5.00000000000e-1"));
    let deviation_line = text
        .lines()
        .find(|l| l.starts_with("max deviation"))
        .expect("deviation line");
    let value: f64 = deviation_line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value < 1e-12);
}

#[test]
fn table_requires_valid_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["table", "--scenario", "case1", "--lambda", "1.5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["table", "--scenario", "case1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulability_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let feasible = run(
        &["simulability", "--lambda", "0", "--grid-step", "0.25"],
        dir.path(),
    );
    assert_eq!(feasible.status.code(), Some(0));
    assert!(stdout(&feasible).contains("verdict: FEASIBLE"));

    let infeasible = run(
        &["simulability", "--lambda", "0.5", "--grid-step", "0.25"],
        dir.path(),
    );
    assert_eq!(infeasible.status.code(), Some(0));
    let text = stdout(&infeasible);
    assert!(text.contains("verdict: INFEASIBLE"));
    assert!(text.contains("a00 * b02 = lambda/2"));
}

#[test]
fn gad_study_reports_unitality_and_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "gad", "--lambda", "0.3", "--p", "0", "--p", "0.5", "--out", "gad.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("gad.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "p,unitality_deviation,k_max");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    // p = 0: deviation equals lambda; p = 1/2: unital.
    assert!((rows[0][1] - 0.3).abs() < 1e-12);
    assert!(rows[1][1].abs() < 1e-12);
    // Temperature does not help.
    assert!(rows[1][2] <= rows[0][2] + 1e-12);
}

#[test]
fn gad_rejects_out_of_range_mixing() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gad", "--lambda", "0.3", "--p", "0.7"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_flags_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["witness", "--gamma", "0.1", "--points", "100"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("non-monotone: false"));

    let out = run(&["witness", "--gamma", "4", "--points", "401"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("non-monotone: true"));
    assert!(text.contains("[1.46"));
}

#[test]
fn svg_sweep_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sweep",
            "--scenario",
            "case2",
            "--gamma",
            "0.1",
            "--gamma",
            "4",
            "--gamma",
            "15",
            "--points",
            "11",
            "--format",
            "svg",
            "--out",
            "chart.svg",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("chart.svg")).unwrap();
    assert!(svg.starts_with("<?xml version=\"1.0\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(
        svg.matches("<polyline").count(),
        3,
        "one polyline per gamma"
    );
    assert!(svg.contains("gamma = 15"));
    // Every tag that opens also closes.
    assert_eq!(svg.matches("<svg").count(), svg.matches("</svg>").count());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# defaults for the damping study\nscenario = case2\nlambda = 0.25\n",
    )
    .unwrap();

    let out = run(&["table", "--config", "run.conf"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("scenario = case2, lambda = 0.25"));

    let out = run(
        &["table", "--config", "run.conf", "--lambda", "0.5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("lambda = 0.5"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "points: 12\n").unwrap();
    let out = run(&["table", "--config", "bad.conf"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(dir.path().join("bad2.conf"), "unknown-key = 1\n").unwrap();
    let out = run(&["table", "--config", "bad2.conf"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
