use serde::{Deserialize, Serialize};

use super::runner::CellOutcome;
use crate::dgp::DgpKind;
use crate::dynreg::Criterion;
use crate::forecasting::ratio_with_se;
use crate::hac::TestMethod;
use crate::linalg::pairwise_sum;

/// Label of the estimation arm shared by all HAC tests (the OLS β̂).
pub const HAC_ARM: &str = "HAC";

/// One row of an experiment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub dgp: DgpKind,
    pub criterion: Criterion,
    pub rho: f64,
    pub t: usize,
    pub method: String,
    pub beta_true: f64,
    pub bias: Option<f64>,
    /// Population variance (divisor = replications).
    pub variance: Option<f64>,
    /// `bias² + variance`.
    pub mse: Option<f64>,
    /// `MSE(OLS) / MSE(DynReg)` of the cell.
    pub re_est: Option<f64>,
    /// Delta-method Monte Carlo standard error of `re_est`.
    pub re_est_se: Option<f64>,
    pub rejection: Option<f64>,
    /// `√(r(1 − r)/reps)`.
    pub mc_se: Option<f64>,
    pub lag_median: Option<f64>,
    pub lag_mean: Option<f64>,
    pub reps_used: usize,
    pub failed_reps: usize,
}

impl ExperimentSummary {
    fn blank(cell: &CellOutcome, method: &str) -> Self {
        Self {
            dgp: cell.key.dgp,
            criterion: cell.key.criterion,
            rho: cell.key.rho,
            t: cell.key.t,
            method: method.to_string(),
            beta_true: cell.key.beta_true,
            bias: None,
            variance: None,
            mse: None,
            re_est: None,
            re_est_se: None,
            rejection: None,
            mc_se: None,
            lag_median: None,
            lag_mean: None,
            reps_used: cell.records.len(),
            failed_reps: cell.failed_reps,
        }
    }
}

/// Bias, population variance and MSE of a set of estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationStats {
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

impl EstimationStats {
    pub fn from_estimates(estimates: &[f64], truth: f64) -> Option<Self> {
        if estimates.is_empty() {
            return None;
        }
        let n = estimates.len() as f64;
        let errors: Vec<f64> = estimates.iter().map(|b| b - truth).collect();
        let bias = pairwise_sum(&errors) / n;
        let dev: Vec<f64> = errors.iter().map(|e| (e - bias) * (e - bias)).collect();
        let variance = pairwise_sum(&dev) / n;
        Some(Self {
            bias,
            variance,
            mse: bias * bias + variance,
        })
    }
}

/// Median (mean of the two middle values for even counts).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Rejection frequency and its Monte Carlo standard error.
pub fn rejection_rate(rejects: impl Iterator<Item = bool>) -> Option<(f64, f64)> {
    let (mut hits, mut n) = (0usize, 0usize);
    for r in rejects {
        hits += r as usize;
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let r = hits as f64 / n as f64;
    Some((r, (r * (1.0 - r) / n as f64).sqrt()))
}

struct CellEstimation {
    ols: Option<EstimationStats>,
    dyn_: Option<EstimationStats>,
    re_est: Option<(f64, f64)>,
    lag_median: Option<f64>,
    lag_mean: Option<f64>,
}

fn cell_estimation(cell: &CellOutcome) -> CellEstimation {
    let truth = cell.key.beta_true;
    let b_ols: Vec<f64> = cell.records.iter().map(|r| r.beta_ols).collect();
    let b_dyn: Vec<f64> = cell.records.iter().map(|r| r.beta_dyn).collect();
    let lags: Vec<f64> = cell.records.iter().map(|r| r.lag as f64).collect();
    let ols = EstimationStats::from_estimates(&b_ols, truth);
    let dyn_ = EstimationStats::from_estimates(&b_dyn, truth);
    let re_est = ols.zip(dyn_).map(|(o, d)| {
        let sq = |b: &[f64]| {
            b.iter()
                .map(|v| (v - truth) * (v - truth))
                .collect::<Vec<_>>()
        };
        let (_, se) = ratio_with_se(&sq(&b_ols), &sq(&b_dyn));
        // Ratio of the decomposed MSEs so it agrees with the printed rows.
        (o.mse / d.mse, se)
    });
    CellEstimation {
        ols,
        dyn_,
        re_est,
        lag_median: median(&lags),
        lag_mean: (!lags.is_empty()).then(|| pairwise_sum(&lags) / lags.len() as f64),
    }
}

impl CellEstimation {
    fn fill(&self, row: &mut ExperimentSummary, dynamic: bool) {
        let stats = if dynamic { self.dyn_ } else { self.ols };
        if let Some(s) = stats {
            row.bias = Some(s.bias);
            row.variance = Some(s.variance);
            row.mse = Some(s.mse);
        }
        if let Some((r, se)) = self.re_est {
            row.re_est = Some(r);
            row.re_est_se = Some(se);
        }
        if dynamic {
            row.lag_median = self.lag_median;
            row.lag_mean = self.lag_mean;
        }
    }
}

/// Estimation rows: the shared OLS arm (labelled `HAC`) and DynReg.
pub fn estimation_summaries(cell: &CellOutcome) -> Vec<ExperimentSummary> {
    let est = cell_estimation(cell);
    let mut hac = ExperimentSummary::blank(cell, HAC_ARM);
    est.fill(&mut hac, false);
    let mut dyn_row = ExperimentSummary::blank(cell, TestMethod::DynReg.label());
    est.fill(&mut dyn_row, true);
    vec![hac, dyn_row]
}

/// One rejection-frequency row per tested method.
pub fn rejection_summaries(cell: &CellOutcome) -> Vec<ExperimentSummary> {
    cell.methods
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut row = ExperimentSummary::blank(cell, m.label());
            if let Some((r, se)) = rejection_rate(cell.records.iter().map(|rec| rec.rejects[i])) {
                row.rejection = Some(r);
                row.mc_se = Some(se);
            }
            row
        })
        .collect()
}

/// Rejection rows that also carry the estimation statistics of the arm
/// each test is built on.
pub fn combined_summaries(cell: &CellOutcome) -> Vec<ExperimentSummary> {
    let est = cell_estimation(cell);
    let mut rows = rejection_summaries(cell);
    for (row, m) in rows.iter_mut().zip(&cell.methods) {
        est.fill(row, *m == TestMethod::DynReg);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn mse_decomposes() {
        let s = EstimationStats::from_estimates(&[1.1, 0.9, 1.3, 1.05], 1.0).unwrap();
        let direct = [0.1f64, -0.1, 0.3, 0.05].iter().map(|e| e * e).sum::<f64>() / 4.0;
        assert!((s.mse - direct).abs() < 1e-12);
        assert!((s.mse - s.bias * s.bias - s.variance).abs() <= 1e-10 * s.mse);
    }

    #[test]
    fn rejection_se() {
        let (r, se) = rejection_rate([true, false, false, false].into_iter()).unwrap();
        assert_eq!(r, 0.25);
        assert!((se - (0.25f64 * 0.75 / 4.0).sqrt()).abs() < 1e-15);
    }
}
