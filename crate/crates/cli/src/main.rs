//! `gpvortex`: Townes profile, correctors, constants, minimizers, expansion
//! checks and sweeps from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters or inputs; exit code 2.
    Validation(String),
    /// A solver stopped without converging; exit code 3.
    NotConverged(String),
    /// I/O and other failures; exit code 1.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::NotConverged(m) | CliError::Io(m) => m,
        }
    }
}

impl From<gpvortex::Error> for CliError {
    fn from(e: gpvortex::Error) -> Self {
        use gpvortex::Error as E;
        let msg = e.to_string();
        match e {
            E::NotConverged { .. } | E::EnergyIncrease { .. } | E::Collapse { .. } | E::Bracket(_) => {
                CliError::NotConverged(msg)
            }
            E::Io(_) => CliError::Io(msg),
            _ => CliError::Validation(msg),
        }
    }
}

#[derive(Parser)]
#[command(name = "gpvortex", version, about = "Rotating Gross-Pitaevskii ground states near the critical mass")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the Townes profile w and check its integral identities.
    Kwong(KwongArgs),
    /// Solve the corrector equations and write the fields.
    Psi(PsiArgs),
    /// Expansion constants and their identities.
    Constants(ConstantsArgs),
    /// Minimize the rotating energy at fixed mass.
    Minimize(MinimizeArgs),
    /// Gauge-fit a minimizer and compare it with the expansion.
    Verify(VerifyArgs),
    /// Run verify over a list of interaction strengths.
    Sweep(SweepArgs),
}

#[derive(Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct KwongArgs {
    /// JSON file with any of the fields below; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Grid points per axis [256].
    #[arg(long)]
    n: Option<usize>,
    /// Box half-width [16].
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<f64>,
    /// Bisection tolerance on w(0) [1e-12].
    #[arg(long)]
    tol: Option<f64>,
    /// Output field file for w.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct PsiArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// 1, 2, aniso, I, 3, 4, 5 or all [all].
    #[arg(long)]
    which: Option<String>,
    /// Trap anisotropy in (0, 1] [0.8].
    #[arg(long)]
    #[serde(rename = "Lambda")]
    lambda: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<f64>,
    #[arg(long)]
    kwong_tol: Option<f64>,
    /// Directory for the field files and psi.json [.].
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct ConstantsArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    #[serde(rename = "Lambda")]
    lambda: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<f64>,
    #[arg(long)]
    kwong_tol: Option<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct MinimizeArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Interaction strength, below a*.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    #[serde(rename = "Lambda")]
    lambda: Option<f64>,
    /// Rotation speed, below 2 min(1, Lambda) [0].
    #[arg(long)]
    #[serde(rename = "Omega")]
    omega: Option<f64>,
    /// physical or rescaled [rescaled].
    #[arg(long)]
    frame: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Half-width [16 rescaled, 6 physical].
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<f64>,
    /// Flow time step [1e-3].
    #[arg(long)]
    dt: Option<f64>,
    /// Residual tolerance [1e-9].
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    tol_energy: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// gaussian, kwong-seeded or a field file [kwong-seeded].
    #[arg(long)]
    init: Option<String>,
    /// Residual at which Newton takes over; 0 disables Newton [1e-2].
    #[arg(long)]
    newton_switch: Option<f64>,
    #[arg(long)]
    max_newton: Option<usize>,
    #[arg(long)]
    kwong_tol: Option<f64>,
    #[arg(long)]
    profile_n: Option<usize>,
    #[arg(long = "profile-L")]
    #[serde(rename = "profile_L")]
    profile_l: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    #[serde(rename = "Lambda")]
    lambda: Option<f64>,
    #[arg(long)]
    #[serde(rename = "Omega")]
    omega: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<f64>,
    #[arg(long)]
    kwong_tol: Option<f64>,
    /// Minimizer field; computed in the rescaled frame when absent.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Frame of --field [rescaled].
    #[arg(long)]
    frame: Option<String>,
    #[arg(long)]
    min_report: Option<PathBuf>,
    #[arg(long)]
    psi_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Comma-separated interaction strengths.
    #[arg(long, value_delimiter = ',')]
    a_list: Option<Vec<f64>>,
    /// Comma-separated offsets a* - a.
    #[arg(long, value_delimiter = ',')]
    da_list: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(rename = "Lambda")]
    lambda: Option<f64>,
    #[arg(long)]
    #[serde(rename = "Omega")]
    omega: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<f64>,
    #[arg(long)]
    kwong_tol: Option<f64>,
    /// Worker threads [1].
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    use config::resolve;
    match cli.command {
        Command::Kwong(a) => commands::kwong(resolve(a.config.as_deref(), &a)?),
        Command::Psi(a) => commands::psi(resolve(a.config.as_deref(), &a)?),
        Command::Constants(a) => commands::constants(resolve(a.config.as_deref(), &a)?),
        Command::Minimize(a) => commands::minimize(resolve(a.config.as_deref(), &a)?),
        Command::Verify(a) => commands::verify(resolve(a.config.as_deref(), &a)?),
        Command::Sweep(a) => commands::sweep(resolve(a.config.as_deref(), &a)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gpvortex: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
