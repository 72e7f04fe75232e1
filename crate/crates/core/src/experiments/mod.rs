//! Monte Carlo harness: efficiency, size, power, size-distortion
//! surfaces, weak exogeneity and forecasting experiments.
//!
//! Every family runs cells one after another and parallelizes over
//! replications. Replication `r` of any cell draws from stream
//! `(seed, r)`, and results are gathered in replication order, so output is
//! identical for any thread count.

mod config;
mod output;
mod runner;
mod summary;

pub use config::{
    default_beta_grid, symmetric_beta_grid, ExperimentConfig, DEFAULT_REPS, DEFAULT_RHOS,
    DEFAULT_SEED, DEFAULT_TS, SURFACE_RHOS, SURFACE_TS, WEAK_EXO_BETAS,
};
pub use output::{run_to_dir, CellFailure, CsvTable, Family, RunReport};
pub use runner::{run_cell, CellKey, CellOutcome, RepRecord};
pub use summary::{
    combined_summaries, estimation_summaries, median, rejection_rate, rejection_summaries,
    EstimationStats, ExperimentSummary, HAC_ARM,
};

use serde::{Deserialize, Serialize};

use crate::dgp::DgpKind;
use crate::error::Result;
use crate::forecasting::{analytic_re_pred, mspe_experiment_with, MspeResult};
use crate::hac::TestMethod;

/// A point of the size-distortion surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub rho: f64,
    pub t: usize,
    pub method: String,
    /// Rejection frequency minus the nominal level.
    pub size_distortion: f64,
}

/// One row of the forecasting table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub t: usize,
    pub rho: f64,
    pub result: MspeResult,
    /// Large-sample ratio; only defined for AR(1) disturbances.
    pub analytic_re_pred: Option<f64>,
}

fn grid<T>(
    config: &ExperimentConfig,
    betas: &[f64],
    mut per_cell: impl FnMut(&CellOutcome) -> Vec<T>,
) -> Result<Vec<T>> {
    config.validate()?;
    let pool = config.thread_pool()?;
    let mut rows = Vec::new();
    for &t in &config.ts {
        for &rho in &config.rhos {
            for &beta in betas {
                let cell = pool.install(|| run_cell(config, rho, t, beta))?;
                rows.extend(per_cell(&cell));
            }
        }
    }
    Ok(rows)
}

/// Bias, variance, MSE and relative efficiency of the OLS and DynReg
/// estimates of β, with lag-order statistics.
pub fn run_efficiency(config: &ExperimentConfig) -> Result<Vec<ExperimentSummary>> {
    grid(config, &[config.null_value], estimation_summaries)
}

/// Rejection frequencies of every method's test of the true β.
pub fn run_size(config: &ExperimentConfig) -> Result<Vec<ExperimentSummary>> {
    grid(config, &[config.null_value], rejection_summaries)
}

/// [`run_efficiency`] and [`run_size`] from one pass over the cells.
pub fn run_table(
    config: &ExperimentConfig,
) -> Result<(Vec<ExperimentSummary>, Vec<ExperimentSummary>)> {
    let mut size = Vec::new();
    let eff = grid(config, &[config.null_value], |cell| {
        size.extend(rejection_summaries(cell));
        estimation_summaries(cell)
    })?;
    Ok((eff, size))
}

/// Rejection frequencies of `H0: β = null` with data generated at every
/// `β_true` of the grid.
pub fn run_power(config: &ExperimentConfig) -> Result<Vec<ExperimentSummary>> {
    grid(config, &config.beta_grid, rejection_summaries)
}

/// Size distortion (rejection frequency minus level) over the grid.
pub fn run_surface(config: &ExperimentConfig) -> Result<Vec<SurfacePoint>> {
    grid(config, &[config.null_value], |cell| {
        surface_points(cell, config.level)
    })
}

pub(crate) fn surface_points(cell: &CellOutcome, level: f64) -> Vec<SurfacePoint> {
    rejection_summaries(cell)
        .into_iter()
        .filter_map(|s| {
            Some(SurfacePoint {
                rho: s.rho,
                t: s.t,
                method: s.method,
                size_distortion: s.rejection? - level,
            })
        })
        .collect()
}

/// Estimation statistics and rejection frequencies under the weakly
/// exogenous VAR(1) design, at `β_true ∈ {1, 0.8}`.
pub fn run_weak_exo(config: &ExperimentConfig) -> Result<Vec<ExperimentSummary>> {
    let cfg = weak_exo_config(config);
    grid(&cfg, &WEAK_EXO_BETAS, combined_summaries)
}

pub(crate) fn weak_exo_config(config: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        dgp: DgpKind::WeakExo,
        rhos: vec![0.0],
        methods: if config.methods.is_empty() {
            TestMethod::STANDARD.to_vec()
        } else {
            config.methods.clone()
        },
        ..config.clone()
    }
}

/// One-step prediction MSPE of static OLS and DynReg forecasts.
pub fn run_forecast(config: &ExperimentConfig) -> Result<Vec<ForecastRow>> {
    config.validate()?;
    let pool = config.thread_pool()?;
    let mut rows = Vec::new();
    for &t in &config.ts {
        for &rho in &config.rhos {
            rows.push(pool.install(|| forecast_cell(config, rho, t))?);
        }
    }
    Ok(rows)
}

pub(crate) fn forecast_cell(config: &ExperimentConfig, rho: f64, t: usize) -> Result<ForecastRow> {
    let spec = config.spec(rho, t, config.null_value);
    let result = mspe_experiment_with(&spec, config.reps, config.seed, &config.order_search(t))?;
    let analytic = match config.dgp {
        DgpKind::ArAr if config.rho_x.is_none_or(|rx| rx == rho) => Some(analytic_re_pred(rho)?),
        _ => None,
    };
    Ok(ForecastRow {
        t,
        rho,
        result,
        analytic_re_pred: analytic,
    })
}
