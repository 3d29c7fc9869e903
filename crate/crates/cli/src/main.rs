mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

/// Exceptional-Hermite oscillators, isospectral families and uncertainty tables.
#[derive(Debug, Parser)]
#[command(name = "reho", version, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    /// Write to this file (or directory, for `tables --which all`) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Quadrature truncation half-width.
    #[arg(long, global = true)]
    pub half_width: Option<f64>,

    /// Quadrature relative tolerance (overrides REHO_QUAD_TOL).
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Quadrature absolute tolerance.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,

    /// Quadrature maximum bisection depth.
    #[arg(long, global = true)]
    pub max_depth: Option<u32>,

    /// Finite-difference grid half-width.
    #[arg(long, global = true)]
    pub grid_half_width: Option<f64>,

    /// Finite-difference grid point count (odd, at least 501).
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute the published uncertainty and moment tables.
    Tables(TablesArgs),
    /// Emit potential, wavefunction and uncertainty-sweep data.
    Curves(CurvesArgs),
    /// Moments and uncertainty product of individual states.
    Uncertainty(UncertaintyArgs),
    /// Run the numerical validation suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    UnRe,
    UnIso,
    UnPam,
    AppendixA,
    AppendixB,
    All,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub which: Which,

    /// Deformation parameters for the isospectral tables (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Reho,
    Partner,
    Iso,
    Pursey,
    Am,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Potential,
    Psi,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    M,
    N,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// One row per (curve, x).
    Long,
    /// One row per x, one column per curve.
    Wide,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, value_enum, default_value = "reho")]
    pub family: Family,

    /// Even codimensions (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub m: Vec<i64>,

    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,

    /// Quantum numbers for wavefunction curves and sweeps.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<i64>,

    #[arg(long, value_enum, default_value = "potential")]
    pub quantity: Quantity,

    #[arg(long, allow_hyphen_values = true, default_value_t = -5.0)]
    pub x_min: f64,

    #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
    pub x_max: f64,

    #[arg(long, default_value_t = 0.05)]
    pub x_step: f64,

    #[arg(long, value_enum, default_value = "long")]
    pub layout: Layout,

    /// Emit uncertainty products along m, n or lambda instead of x.
    #[arg(long, value_enum)]
    pub uncertainty_sweep: Option<Sweep>,

    #[arg(long, default_value_t = 10)]
    pub m_max: i64,

    #[arg(long, default_value_t = 10)]
    pub n_max: i64,

    #[arg(long, default_value_t = 1e-12)]
    pub lambda_min: f64,

    #[arg(long, default_value_t = 1e2)]
    pub lambda_max: f64,

    /// Logarithmically spaced points of a lambda sweep.
    #[arg(long, default_value_t = 57)]
    pub lambda_points: usize,
}

#[derive(Debug, Args)]
pub struct UncertaintyArgs {
    #[arg(long, value_enum, default_value = "reho")]
    pub family: Family,

    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub m: Vec<i64>,

    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,

    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub n: Vec<i64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,2,4")]
    pub m: Vec<i64>,

    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,100,-2")]
    pub lambda: Vec<f64>,

    /// Levels checked per family.
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
