use rayon::prelude::*;
use std::path::{Path, PathBuf};

use pingpong_qkd::{
    algebraic_witness, closed_form_joint, feasibility_search, gad_kraus, jc_damping, key_rates,
    measure_joint, nonmarkov_witness, unitality_deviation, DampingParams, GadParams, KeyRateReport,
    ProtocolScenario, StochasticMap,
};

use crate::output::{self, sig12};
use crate::{Failure, FormatArg, ScenarioArg, Settings};

/// One sweep grid point.
pub struct SweepRow {
    pub scenario: &'static str,
    pub gt: f64,
    pub gamma: f64,
    pub report: KeyRateReport,
}

fn scenario_for(arg: ScenarioArg, lambda: f64) -> Result<ProtocolScenario, Failure> {
    match arg {
        ScenarioArg::Noiseless => Ok(ProtocolScenario::Noiseless),
        ScenarioArg::Case1 => Ok(ProtocolScenario::Case1TravelOnly { lambda }),
        ScenarioArg::Case2 => Ok(ProtocolScenario::Case2BothQubits { lambda }),
        ScenarioArg::Gad => Err(Failure::usage(
            "the finite-temperature scenario is driven by the `gad` command",
        )),
    }
}

fn scenario_name(arg: ScenarioArg) -> &'static str {
    match arg {
        ScenarioArg::Noiseless => "noiseless",
        ScenarioArg::Case1 => "case1",
        ScenarioArg::Case2 => "case2",
        ScenarioArg::Gad => "gad",
    }
}

fn require_lambda(settings: &Settings) -> Result<f64, Failure> {
    let lambda = settings
        .lambda
        .ok_or_else(|| Failure::usage("--lambda is required for this command"))?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Failure::usage(format!(
            "--lambda must lie in [0, 1], got {lambda}"
        )));
    }
    Ok(lambda)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

/// Info-theory invariants re-checked on every emitted row.
fn check_row(report: &KeyRateReport) -> Result<(), Failure> {
    report
        .check()
        .map_err(|e| Failure::invariant(format!("emitted row violates invariants: {e}")))?;
    if (report.chi_ae - report.i_ae).abs() > 1e-9 {
        return Err(Failure::invariant(format!(
            "emitted row has chi(A:E) = {} far from I(A:E) = {}",
            report.chi_ae, report.i_ae
        )));
    }
    if report.i_ab > report.chi_ab + 1e-9 {
        return Err(Failure::invariant(format!(
            "emitted row has I(A:B) = {} above chi(A:B) = {}",
            report.i_ab, report.chi_ab
        )));
    }
    Ok(())
}

pub fn sweep(settings: &Settings) -> Result<(), Failure> {
    if !matches!(settings.scenario, ScenarioArg::Case1 | ScenarioArg::Case2) {
        return Err(Failure::usage("sweep supports --scenario case1 or case2"));
    }
    if settings.points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    if !(settings.t_max > 0.0) {
        return Err(Failure::usage("--t-max must be positive"));
    }
    if settings.gammas.is_empty() {
        return Err(Failure::usage("at least one --gamma is required"));
    }
    let name = scenario_name(settings.scenario);

    let grid: Vec<(f64, f64)> = settings
        .gammas
        .iter()
        .flat_map(|&gamma| {
            (0..settings.points).map(move |i| {
                let gt = settings.t_max * i as f64 / (settings.points - 1) as f64;
                (gamma, gt)
            })
        })
        .collect();

    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&(gamma, gt)| -> Result<SweepRow, Failure> {
            let params =
                DampingParams::new(settings.g, gamma).map_err(|e| Failure::usage(e.to_string()))?;
            let lambda = jc_damping(&params, gt).map_err(|e| Failure::usage(e.to_string()))?;
            let scenario = scenario_for(settings.scenario, lambda)?;
            let report = key_rates(&scenario).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(SweepRow {
                scenario: name,
                gt,
                gamma,
                report,
            })
        })
        .collect::<Result<_, _>>()?;

    for row in &rows {
        check_row(&row.report)?;
    }

    let path = settings.out.clone().unwrap_or_else(|| {
        PathBuf::from(match settings.format {
            FormatArg::Csv => "sweep.csv",
            FormatArg::Svg => "sweep.svg",
        })
    });
    let contents = match settings.format {
        FormatArg::Csv => output::sweep_csv(&rows),
        FormatArg::Svg => output::sweep_svg(&rows, &settings.gammas, settings.t_max),
    };
    write_file(&path, &contents)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

pub fn table(settings: &Settings) -> Result<(), Failure> {
    let lambda = match settings.scenario {
        ScenarioArg::Noiseless => 0.0,
        _ => require_lambda(settings)?,
    };
    let scenario = scenario_for(settings.scenario, lambda)?;
    let measured = measure_joint(&scenario).map_err(|e| Failure::usage(e.to_string()))?;
    let closed = closed_form_joint(&scenario).map_err(|e| Failure::usage(e.to_string()))?;

    println!(
        "joint outcome table, scenario = {}, lambda = {lambda}",
        scenario_name(settings.scenario)
    );
    println!("Bell symbols: 0 = psi+, 1 = psi-, 2 = phi+, 3 = phi-");
    println!(
        " A  E  B  {:>20} {:>20} {:>12}",
        "measured", "closed-form", "|diff|"
    );
    let mut worst = 0.0_f64;
    for ((a, e, b), value) in measured.iter() {
        let reference = closed.get(a, e, b);
        let diff = (value - reference).abs();
        worst = worst.max(diff);
        println!(
            " {a}  {e}  {b}  {:>20} {:>20} {:>12.3e}",
            sig12(value),
            sig12(reference),
            diff
        );
    }
    println!("max deviation: {worst:.3e}");
    Ok(())
}

pub fn simulability(settings: &Settings) -> Result<(), Failure> {
    let lambda = require_lambda(settings)?;
    if !(0.0 < settings.grid_step && settings.grid_step <= 0.5) {
        return Err(Failure::usage("--grid-step must lie in (0, 0.5]"));
    }
    if !(settings.tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }

    let source = closed_form_joint(&ProtocolScenario::Noiseless)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let target = closed_form_joint(&ProtocolScenario::Case2BothQubits { lambda })
        .map_err(|e| Failure::usage(e.to_string()))?;
    let report = feasibility_search(&source, &target, settings.grid_step, settings.tol)
        .map_err(|e| Failure::usage(e.to_string()))?;

    println!("source: noiseless joint table");
    println!("target: both-qubits damping at lambda = {lambda}");
    println!(
        "grid step {} over Alice's two free parameters, tolerance {}",
        settings.grid_step, settings.tol
    );
    println!();
    println!(
        "minimal L-infinity residual: {}",
        sig12(report.min_residual)
    );
    print_map("best Alice map", &report.best_a);
    print_map("best Bob map", &report.best_b);
    println!();

    let witness = algebraic_witness(lambda).map_err(|e| Failure::usage(e.to_string()))?;
    println!("algebraic certificate:");
    for (i, step) in witness.steps.iter().enumerate() {
        println!("  {}. {step}", i + 1);
    }
    println!();
    println!(
        "verdict: {}",
        if report.feasible {
            "FEASIBLE"
        } else {
            "INFEASIBLE"
        }
    );
    Ok(())
}

fn print_map(label: &str, map: &StochasticMap) {
    let rows: Vec<String> = map
        .rows()
        .iter()
        .map(|row| {
            let entries: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            format!("[{}]", entries.join(", "))
        })
        .collect();
    println!("{label}: [{}]", rows.join(", "));
}

pub fn gad(settings: &Settings, p_list: &[f64]) -> Result<(), Failure> {
    let lambda = require_lambda(settings)?;
    if p_list.is_empty() {
        return Err(Failure::usage("at least one --p value is required"));
    }
    for &p in p_list {
        if !(0.0..=0.5).contains(&p) {
            return Err(Failure::usage(format!(
                "--p values must lie in [0, 1/2], got {p}"
            )));
        }
    }

    let mut lines = vec!["p,unitality_deviation,k_max".to_string()];
    let mut previous = f64::INFINITY;
    for &p in p_list {
        let params = GadParams::new(p, lambda).map_err(|e| Failure::usage(e.to_string()))?;
        let channel = gad_kraus(&params).map_err(|e| Failure::usage(e.to_string()))?;
        let deviation = unitality_deviation(&channel).map_err(|e| Failure::usage(e.to_string()))?;
        let report = key_rates(&ProtocolScenario::GadBothQubits { p, lambda })
            .map_err(|e| Failure::usage(e.to_string()))?;
        check_row(&report)?;
        if report.k_max > previous + 1e-12 {
            eprintln!(
                "warning: k_max increased from {previous} to {} at p = {p}",
                report.k_max
            );
        }
        previous = report.k_max;
        lines.push(format!(
            "{},{},{}",
            sig12(p),
            sig12(deviation),
            sig12(report.k_max)
        ));
    }

    let path = settings
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("gad.csv"));
    write_file(&path, &(lines.join("\n") + "\n"))?;
    println!(
        "wrote {} rows to {} (lambda = {lambda})",
        p_list.len(),
        path.display()
    );
    Ok(())
}

pub fn witness(settings: &Settings) -> Result<(), Failure> {
    if settings.points < 10 {
        return Err(Failure::usage("--points must be at least 10"));
    }
    for &gamma in &settings.gammas {
        let params =
            DampingParams::new(settings.g, gamma).map_err(|e| Failure::usage(e.to_string()))?;
        let scan = nonmarkov_witness(&params, settings.t_max, settings.points)
            .map_err(|e| Failure::usage(e.to_string()))?;
        println!(
            "# gamma = {gamma}, g = {}: {} regime (2 gamma {} g)",
            settings.g,
            if params.is_non_markovian() {
                "non-Markovian"
            } else {
                "Markovian-like"
            },
            if params.is_non_markovian() { ">" } else { "<=" },
        );
        println!("{:>14} {:>20}", "gt", "lambda");
        let step = settings.t_max / (settings.points - 1) as f64;
        for i in 0..settings.points {
            let t = i as f64 * step;
            let lambda = jc_damping(&params, t).map_err(|e| Failure::usage(e.to_string()))?;
            println!("{t:>14.6} {:>20}", sig12(lambda));
        }
        println!("non-monotone: {}", scan.non_markovian);
        if scan.revival_intervals.is_empty() {
            println!("no revival intervals");
        } else {
            println!("revival intervals (lambda decreasing):");
            for (start, end) in &scan.revival_intervals {
                println!("  [{start:.6}, {end:.6}]");
            }
        }
        println!();
    }
    Ok(())
}
