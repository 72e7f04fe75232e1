use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// HAC and dynamic-regression inference for a regression coefficient with
/// serially correlated errors, plus the Monte Carlo experiments comparing
/// them.
#[derive(Debug, Parser)]
#[command(name = "dynreg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one data set (CSV with a `y` column and `x`, `x1`, `x2`, ... columns).
    Analyze(AnalyzeArgs),
    /// Write one simulated sample as CSV (columns t, y, x, u).
    Simulate(SimulateArgs),
    /// Efficiency and size tables (efficiency.csv, size.csv).
    Table(ExperimentArgs),
    /// Size-distortion grid over a dense (rho, T) grid (surface.csv).
    Surface(ExperimentArgs),
    /// Rejection frequencies over a grid of true beta values (power.csv).
    Power(PowerArgs),
    /// One-step prediction MSPE of OLS and DynReg forecasts (forecast.csv).
    Forecast(ExperimentArgs),
    /// Weakly exogenous VAR(1) design at beta = 1 and 0.8 (weakexo.csv).
    Weakexo(ExperimentArgs),
    /// Simulated fixed-b critical value for the h = T Bartlett test.
    Critval(CritvalArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input CSV file.
    pub input: PathBuf,
    /// ols, nw, nw-a, nw-llsw, nw-kv, m-llsw or dynreg [default: dynreg]
    #[arg(long)]
    pub method: Option<String>,
    /// Largest DynReg lag order [default: min(T/5, 30)]
    #[arg(long)]
    pub pmax: Option<usize>,
    /// Fixed DynReg lag order instead of selection [default: none]
    #[arg(long)]
    pub p: Option<usize>,
    /// bic or aic [default: bic]
    #[arg(long)]
    pub criterion: Option<String>,
    /// Rows each candidate lag order is scored on: common or per-order [default: common]
    #[arg(long = "ic-sample")]
    pub ic_sample: Option<String>,
    /// Two-sided test level [default: 0.05]
    #[arg(long)]
    pub level: Option<f64>,
    /// Hypothesized coefficient value [default: 0]
    #[arg(long)]
    pub null: Option<f64>,
    /// Tested regressor, 0-based [default: 0]
    #[arg(long)]
    pub coef: Option<usize>,
    /// Cosine-count coefficient for m-llsw [default: 0.41]
    #[arg(long = "mllsw-coef")]
    pub mllsw_coef: Option<f64>,
    /// Student-t(n - m) reference for the DynReg test [default: false]
    #[arg(long = "student-t")]
    pub student_t: bool,
    /// Print JSON instead of text [default: false]
    #[arg(long)]
    pub json: bool,
    /// key=value file with defaults for the flags above [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// ar, ma or weakexo [default: ar]
    #[arg(long)]
    pub dgp: Option<String>,
    /// Autoregressive / moving-average parameter [default: 0.9]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Sample size [default: 200]
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Regressor AR coefficient when it differs from rho [default: rho]
    #[arg(long = "rho-x")]
    pub rho_x: Option<f64>,
    /// True coefficient [default: 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Master seed [default: 19620815]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replication index within the seed [default: 0]
    #[arg(long)]
    pub rep: Option<u64>,
    /// Output file; standard output when absent [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for the flags above [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// ar, ma or weakexo [default: ar]
    #[arg(long)]
    pub dgp: Option<String>,
    /// Comma-separated rho values [default: 0,0.3,0.5,0.7,0.9,0.95,0.99; surface: 0,0.1,...,0.9,0.95,0.99]
    #[arg(long)]
    pub rho: Option<String>,
    /// Comma-separated sample sizes [default: 50,200,600,2500; surface: 50,200,500,1000,1500,2000,2500]
    #[arg(long = "T")]
    pub t: Option<String>,
    /// Replications per cell [default: 2000]
    #[arg(long)]
    pub reps: Option<usize>,
    /// bic or aic [default: bic]
    #[arg(long)]
    pub criterion: Option<String>,
    /// Rows each candidate lag order is scored on: common or per-order [default: common]
    #[arg(long = "ic-sample")]
    pub ic_sample: Option<String>,
    /// Master seed [default: 19620815]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = all cores [default: 0]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory, created if absent [default: results]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated tests [default: ols,nw,nw-a,nw-llsw,nw-kv,m-llsw,dynreg]
    #[arg(long)]
    pub methods: Option<String>,
    /// Two-sided test level [default: 0.05]
    #[arg(long)]
    pub level: Option<f64>,
    /// Regressor AR coefficient for ma designs when it differs from rho [default: rho]
    #[arg(long = "rho-x")]
    pub rho_x: Option<f64>,
    /// Cosine-count coefficient for m-llsw [default: 0.41]
    #[arg(long = "mllsw-coef")]
    pub mllsw_coef: Option<f64>,
    /// Largest DynReg lag order [default: min(T/5, 30)]
    #[arg(long)]
    pub pmax: Option<usize>,
    /// Student-t(n - m) reference for the DynReg test [default: false]
    #[arg(long = "student-t")]
    pub student_t: bool,
    /// Skip cells already present in the output files [default: false]
    #[arg(long)]
    pub resume: bool,
    /// key=value file with defaults for the flags above [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub common: ExperimentArgs,
    /// Comma-separated true beta values [default: 1,1.025,...,1.5]
    #[arg(long)]
    pub betas: Option<String>,
    /// Use the two-sided grid 0.5,0.525,...,1.5 [default: false]
    #[arg(long)]
    pub symmetric: bool,
}

#[derive(Debug, Args)]
pub struct CritvalArgs {
    /// Two-sided test level [default: 0.05]
    #[arg(long)]
    pub level: Option<f64>,
    /// Brownian-motion grid points [default: 1000]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Monte Carlo draws [default: 200000]
    #[arg(long)]
    pub draws: Option<usize>,
    /// Seed [default: 20020917]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = all cores [default: 0]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print JSON instead of text [default: false]
    #[arg(long)]
    pub json: bool,
    /// key=value file with defaults for the flags above [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,
}
