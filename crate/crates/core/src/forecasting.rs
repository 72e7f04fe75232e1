//! One-step-ahead forecasts from static OLS and from the dynamic
//! regression, and Monte Carlo estimation of their mean squared
//! prediction errors.
//!
//! In both arms the next regressor value is itself forecast from an AR(1)
//! fitted to `x` alone (`x̂ = ρ̂ₓ x_T`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::{simulate, DgpSpec, ShockStream};
use crate::dynreg::{
    default_p_max, dynreg_forecast_single, select_order_by, Criterion, OrderSearch,
};
use crate::error::{Error, Result};
use crate::linalg::{dot, pairwise_sum};
use crate::regression::{ols_fit, Sample};

/// Forecasts of `y_{T+1}` and its realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastPair {
    /// Dynamic-regression forecast.
    pub optimal: f64,
    /// Static OLS forecast `β̂ x̂`.
    pub suboptimal: f64,
    pub realized: f64,
}

impl ForecastPair {
    pub fn optimal_error(&self) -> f64 {
        self.realized - self.optimal
    }

    pub fn suboptimal_error(&self) -> f64 {
        self.realized - self.suboptimal
    }
}

/// `½ + 1/(2(1 − ρ²))`.
pub fn analytic_re_pred(rho: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "|rho| = {} must be < 1",
            rho.abs()
        )));
    }
    Ok(0.5 + 0.5 / (1.0 - rho * rho))
}

/// No-intercept least-squares AR(1) coefficient `Σ x_t x_{t−1} / Σ x_{t−1}²`.
pub fn ar1_coefficient(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            rows: x.len().saturating_sub(1),
            params: 1,
        });
    }
    let lagged = &x[..x.len() - 1];
    let denom = dot(lagged, lagged);
    if denom == 0.0 {
        return Err(Error::SingularQ);
    }
    Ok(dot(&x[1..], lagged) / denom)
}

/// Forecasts the last observation of `full` from the preceding ones.
pub fn forecast_pair(full: &Sample, search: &OrderSearch) -> Result<ForecastPair> {
    if full.k() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "forecasting supports one regressor, sample has {}",
            full.k()
        )));
    }
    let t = full.len() - 1;
    let est = full.truncated(t);
    let x = est.x.column(0);
    let x = x.as_slice();
    let x_hat = ar1_coefficient(x)? * x[t - 1];

    let ols = ols_fit(&est.x, &est.y)?;
    let dyn_fit = select_order_by(&est, search)?;
    let optimal = dynreg_forecast_single(&dyn_fit, &est.y, x, x_hat)?;
    Ok(ForecastPair {
        optimal,
        suboptimal: ols.beta_hat[0] * x_hat,
        realized: full.y[t],
    })
}

/// Monte Carlo MSPE of both forecasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MspeResult {
    pub mspe_subopt: f64,
    pub mspe_opt: f64,
    /// `mspe_subopt / mspe_opt`.
    pub re_pred: f64,
    /// Delta-method Monte Carlo standard error of `re_pred`.
    pub re_pred_se: f64,
    pub mean_error_opt: f64,
    pub mean_error_subopt: f64,
    pub error_se_opt: f64,
    pub error_se_subopt: f64,
    pub reps_used: usize,
    pub failed_reps: usize,
}

/// Ratio `mean(a)/mean(b)` with a delta-method standard error.
pub(crate) fn ratio_with_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let ma = pairwise_sum(a) / n;
    let mb = pairwise_sum(b) / n;
    let ratio = ma / mb;
    let da: Vec<f64> = a.iter().map(|v| v - ma).collect();
    let db: Vec<f64> = b.iter().map(|v| v - mb).collect();
    let vaa = pairwise_sum(&da.iter().map(|v| v * v).collect::<Vec<_>>()) / n;
    let vbb = pairwise_sum(&db.iter().map(|v| v * v).collect::<Vec<_>>()) / n;
    let vab = pairwise_sum(&da.iter().zip(&db).map(|(x, y)| x * y).collect::<Vec<_>>()) / n;
    let rel = vaa / (ma * ma) + vbb / (mb * mb) - 2.0 * vab / (ma * mb);
    (ratio, ratio.abs() * (rel.max(0.0) / n).sqrt())
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = pairwise_sum(v) / n;
    let var = pairwise_sum(&v.iter().map(|x| (x - m) * (x - m)).collect::<Vec<_>>()) / n;
    (m, (var / n).sqrt())
}

/// Runs `reps` replications of [`forecast_pair`] on `spec` (estimation
/// sample `spec.t`), replication `r` drawing from stream `(seed, r)`.
///
/// Replications run on the current rayon pool.
pub fn mspe_experiment(
    spec: &DgpSpec,
    reps: usize,
    criterion: Criterion,
    seed: u64,
) -> Result<MspeResult> {
    mspe_experiment_with(
        spec,
        reps,
        seed,
        &OrderSearch::new(criterion, default_p_max(spec.t)),
    )
}

/// [`mspe_experiment`] with explicit lag-order search settings.
pub fn mspe_experiment_with(
    spec: &DgpSpec,
    reps: usize,
    seed: u64,
    search: &OrderSearch,
) -> Result<MspeResult> {
    if reps < 100 {
        return Err(Error::InvalidArgument(format!("reps = {reps} < 100")));
    }
    spec.validate()?;
    let pairs: Vec<Option<ForecastPair>> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let full = simulate(spec, &ShockStream::new(seed, r), 1).ok()?;
            forecast_pair(&full, search).ok()
        })
        .collect();
    let ok: Vec<ForecastPair> = pairs.iter().flatten().copied().collect();
    let failed_reps = reps - ok.len();
    if ok.len() < 2 {
        return Err(Error::InsufficientData {
            rows: ok.len(),
            params: 2,
        });
    }
    let e_opt: Vec<f64> = ok.iter().map(ForecastPair::optimal_error).collect();
    let e_sub: Vec<f64> = ok.iter().map(ForecastPair::suboptimal_error).collect();
    let sq_opt: Vec<f64> = e_opt.iter().map(|e| e * e).collect();
    let sq_sub: Vec<f64> = e_sub.iter().map(|e| e * e).collect();
    let (re_pred, re_pred_se) = ratio_with_se(&sq_sub, &sq_opt);
    let (mean_error_opt, error_se_opt) = mean_and_se(&e_opt);
    let (mean_error_subopt, error_se_subopt) = mean_and_se(&e_sub);
    Ok(MspeResult {
        mspe_subopt: pairwise_sum(&sq_sub) / ok.len() as f64,
        mspe_opt: pairwise_sum(&sq_opt) / ok.len() as f64,
        re_pred,
        re_pred_se,
        mean_error_opt,
        mean_error_subopt,
        error_se_opt,
        error_se_subopt,
        reps_used: ok.len(),
        failed_reps,
    })
}
