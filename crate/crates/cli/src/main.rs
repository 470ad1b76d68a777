//! Command-line front end for the ping-pong QKD simulator.
//!
//! Subcommands: `sweep` (key rates over dimensionless time), `table` (joint
//! outcome probabilities against their closed forms), `simulability`
//! (classical post-processing search), `gad` (finite-temperature study) and
//! `witness` (damping-schedule revival scan).
//!
//! Exit codes: 0 success, 1 bad arguments, 2 I/O failure, 3 internal
//! invariant violation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Noiseless,
    Case1,
    Case2,
    Gad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Svg,
}

#[derive(Parser)]
#[command(
    name = "pingpong-qkd",
    version,
    about = "Ping-pong QKD under the Wojcik attack with trusted damping noise"
)]
struct Cli {
    /// Protocol scenario.
    #[arg(long, global = true, value_enum)]
    scenario: Option<ScenarioArg>,

    /// Spectral bandwidth of the reservoir (inverse time).
    #[arg(long, global = true)]
    g: Option<f64>,

    /// Coupling strength; repeat the flag for several curves.
    #[arg(long, global = true)]
    gamma: Vec<f64>,

    /// Upper end of the dimensionless-time axis.
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,

    /// Number of grid points on the time axis.
    #[arg(long, global = true)]
    points: Option<usize>,

    /// Damping strength in [0, 1].
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// Output path for file-producing commands.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format for sweeps.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Plain key=value defaults file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Key-rate sweep over dimensionless time, one curve per gamma.
    Sweep,
    /// Print the measured joint table next to its closed form.
    Table,
    /// Search for local classical maps reproducing the noisy table.
    Simulability {
        /// Grid step for Alice's two free parameters.
        #[arg(long = "grid-step")]
        grid_step: Option<f64>,
        /// Feasibility threshold on the L-infinity residual.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Finite-temperature study at fixed lambda over a list of mixing values.
    Gad {
        /// Thermal mixing value in [0, 1/2]; repeatable.
        #[arg(long = "p")]
        p: Vec<f64>,
    },
    /// Damping-schedule scan with revival detection.
    Witness,
}

/// A command failure carrying its process exit code.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

/// Fully resolved settings: flags override the config file, which overrides
/// the defaults.
pub struct Settings {
    pub scenario: ScenarioArg,
    pub g: f64,
    pub gammas: Vec<f64>,
    pub t_max: f64,
    pub points: usize,
    pub lambda: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: FormatArg,
    pub grid_step: f64,
    pub tol: f64,
    pub p_list: Vec<f64>,
}

#[derive(Default)]
struct FileConfig {
    scenario: Option<ScenarioArg>,
    g: Option<f64>,
    gamma: Option<Vec<f64>>,
    t_max: Option<f64>,
    points: Option<usize>,
    lambda: Option<f64>,
    out: Option<PathBuf>,
    format: Option<FormatArg>,
    grid_step: Option<f64>,
    tol: Option<f64>,
    p: Option<Vec<f64>>,
}

fn parse_config(path: &PathBuf) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let mut config = FileConfig::default();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::usage(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                line_no + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            Failure::usage(format!(
                "{}:{}: invalid {what} `{value}`",
                path.display(),
                line_no + 1
            ))
        };
        match key {
            "scenario" => {
                config.scenario =
                    Some(ScenarioArg::from_str(value, true).map_err(|_| bad("scenario"))?)
            }
            "g" => config.g = Some(value.parse().map_err(|_| bad("number"))?),
            "gamma" => config.gamma = Some(parse_list(value).map_err(|_| bad("gamma list"))?),
            "t-max" => config.t_max = Some(value.parse().map_err(|_| bad("number"))?),
            "points" => config.points = Some(value.parse().map_err(|_| bad("integer"))?),
            "lambda" => config.lambda = Some(value.parse().map_err(|_| bad("number"))?),
            "out" => config.out = Some(PathBuf::from(value)),
            "format" => {
                config.format = Some(FormatArg::from_str(value, true).map_err(|_| bad("format"))?)
            }
            "grid-step" => config.grid_step = Some(value.parse().map_err(|_| bad("number"))?),
            "tol" => config.tol = Some(value.parse().map_err(|_| bad("number"))?),
            "p" => config.p = Some(parse_list(value).map_err(|_| bad("p list"))?),
            other => {
                return Err(Failure::usage(format!(
                    "{}:{}: unknown key `{other}`",
                    path.display(),
                    line_no + 1
                )))
            }
        }
    }
    Ok(config)
}

fn parse_list(value: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    value
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect()
}

fn resolve(
    cli: &Cli,
    grid_step: Option<f64>,
    tol: Option<f64>,
    p: &[f64],
) -> Result<Settings, Failure> {
    let file = match &cli.config {
        Some(path) => parse_config(path)?,
        None => FileConfig::default(),
    };
    let gammas = if !cli.gamma.is_empty() {
        cli.gamma.clone()
    } else {
        file.gamma.unwrap_or_else(|| vec![0.1, 4.0, 15.0])
    };
    let p_list = if !p.is_empty() {
        p.to_vec()
    } else {
        file.p.unwrap_or_else(|| vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    };
    Ok(Settings {
        scenario: cli.scenario.or(file.scenario).unwrap_or(ScenarioArg::Case1),
        g: cli.g.or(file.g).unwrap_or(1.0),
        gammas,
        t_max: cli.t_max.or(file.t_max).unwrap_or(4.0),
        points: cli.points.or(file.points).unwrap_or(401),
        lambda: cli.lambda.or(file.lambda),
        out: cli.out.clone().or(file.out),
        format: cli.format.or(file.format).unwrap_or(FormatArg::Csv),
        grid_step: grid_step.or(file.grid_step).unwrap_or(0.01),
        tol: tol.or(file.tol).unwrap_or(1e-6),
        p_list,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Sweep => {
            let settings = resolve(&cli, None, None, &[])?;
            commands::sweep(&settings)
        }
        Command::Table => {
            let settings = resolve(&cli, None, None, &[])?;
            commands::table(&settings)
        }
        Command::Simulability { grid_step, tol } => {
            let settings = resolve(&cli, *grid_step, *tol, &[])?;
            commands::simulability(&settings)
        }
        Command::Gad { p } => {
            let settings = resolve(&cli, None, None, p)?;
            let p_list = settings.p_list.clone();
            commands::gad(&settings, &p_list)
        }
        Command::Witness => {
            let settings = resolve(&cli, None, None, &[])?;
            commands::witness(&settings)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
