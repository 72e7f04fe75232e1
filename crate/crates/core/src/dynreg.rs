//! Dynamic regression: the static regression augmented with `p` lags of
//! `y` and of every regressor, estimated by OLS, with the lag order chosen
//! by an information criterion.
//!
//! Coefficients are ordered `(φ₁..φ_p, β₁..β_k, γ₁,₁..γ₁,p, …, γ_k,1..γ_k,p)`
//! and the design columns follow the same order:
//! `(y_{t−1}..y_{t−p}, x_{1,t}..x_{k,t}, x_{1,t−1}..x_{1,t−p}, …)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hac::{critical_value, Reference, TestMethod, TestResult};
use crate::linalg::HouseholderQr;
use crate::regression::{ols_fit, ols_t_stat, RegressionFit, Sample, RANK_TOLERANCE};

/// Lag-order selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    Bic,
    Aic,
    /// Order imposed by the caller.
    Fixed,
}

impl Criterion {
    pub fn label(self) -> &'static str {
        match self {
            Criterion::Bic => "BIC",
            Criterion::Aic => "AIC",
            Criterion::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bic" => Some(Criterion::Bic),
            "aic" => Some(Criterion::Aic),
            "fixed" => Some(Criterion::Fixed),
            _ => None,
        }
    }
}

/// Observations on which candidate orders are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum IcSample {
    /// Every candidate on `t = p_max+1..T`, scored as `n log(sse) + penalty`
    /// with `n = T − p_max`.
    #[default]
    Common,
    /// Candidate `p` on its own rows `t = p+1..T`, scored as
    /// `T log(sse_p) + penalty` with the full `T`.
    PerOrder,
}

impl IcSample {
    pub fn label(self) -> &'static str {
        match self {
            IcSample::Common => "common",
            IcSample::PerOrder => "per-order",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "common" => Some(IcSample::Common),
            "per-order" => Some(IcSample::PerOrder),
            _ => None,
        }
    }
}

/// Lag-order search settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderSearch {
    pub criterion: Criterion,
    pub p_max: usize,
    pub sample: IcSample,
}

impl OrderSearch {
    pub fn new(criterion: Criterion, p_max: usize) -> Self {
        Self {
            criterion,
            p_max,
            sample: IcSample::Common,
        }
    }
}

/// A fitted dynamic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct DynRegFit {
    pub p: usize,
    pub k: usize,
    pub theta_hat: Vec<f64>,
    pub fit: RegressionFit,
    pub criterion_used: Criterion,
    /// Rows in the final fit (`T − p`).
    pub n_effective: usize,
}

impl DynRegFit {
    /// Number of coefficients `p + k + kp`.
    pub fn n_params(&self) -> usize {
        n_params(self.p, self.k)
    }

    /// Index of the contemporaneous coefficient of regressor `i` in θ.
    pub fn beta_index(&self, i: usize) -> usize {
        self.p + i
    }

    pub fn phi(&self) -> &[f64] {
        &self.theta_hat[..self.p]
    }

    pub fn beta(&self) -> &[f64] {
        &self.theta_hat[self.p..self.p + self.k]
    }

    /// Lag coefficients `γ_{i,1..p}` of regressor `i`.
    pub fn gamma(&self, i: usize) -> &[f64] {
        let start = self.p + self.k + i * self.p;
        &self.theta_hat[start..start + self.p]
    }
}

fn n_params(p: usize, k: usize) -> usize {
    p + k + k * p
}

/// Largest candidate order: `min(⌊T/5⌋, 30)`.
pub fn default_p_max(t: usize) -> usize {
    (t / 5).min(30)
}

/// Design and response for rows `t = start..=T` (1-based `t`).
pub fn build_lagged_design(
    sample: &Sample,
    p: usize,
    start: usize,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let t_len = sample.len();
    let k = sample.k();
    if start <= p || start > t_len {
        return Err(Error::InvalidArgument(format!(
            "start {start} must satisfy p < start <= T (p = {p}, T = {t_len})"
        )));
    }
    let rows = t_len - start + 1;
    let m = n_params(p, k);
    if rows <= m {
        return Err(Error::InsufficientData { rows, params: m });
    }
    let first = start - 1;
    let mut data = Vec::with_capacity(rows * m);
    for j in 1..=p {
        data.extend_from_slice(&sample.y[first - j..first - j + rows]);
    }
    for i in 0..k {
        data.extend_from_slice(&sample.x.column(i).as_slice()[first..first + rows]);
    }
    for i in 0..k {
        let col = sample.x.column(i);
        let col = col.as_slice();
        for j in 1..=p {
            data.extend_from_slice(&col[first - j..first - j + rows]);
        }
    }
    let design = DMatrix::from_vec(rows, m, data);
    Ok((design, sample.y[first..].to_vec()))
}

/// `n log(sse) + penalty`, penalty `log(n)(p+k+kp)` (BIC) or `2(p+k+kp)` (AIC).
pub fn ic_score(sse: f64, n: usize, p: usize, k: usize, criterion: Criterion) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} < 2")));
    }
    if !(sse > 0.0) {
        return Err(Error::ZeroSse);
    }
    let nf = n as f64;
    let params = n_params(p, k) as f64;
    let penalty = match criterion {
        Criterion::Bic => nf.ln() * params,
        Criterion::Aic => 2.0 * params,
        Criterion::Fixed => {
            return Err(Error::InvalidArgument(
                "no score for an imposed order".into(),
            ))
        }
    };
    Ok(nf * sse.ln() + penalty)
}

// SSE below this fraction of Σy² counts as an exact fit.
const EXACT_FIT_RELATIVE: f64 = 1e-24;

/// Criterion values for every `p ∈ 0..=p_max` on the common sample
/// `t = p_max+1..T`; `None` marks rank-deficient candidates, `-∞` exact fits.
pub fn order_scores(
    sample: &Sample,
    p_max: usize,
    criterion: Criterion,
) -> Result<Vec<Option<f64>>> {
    let t_len = sample.len();
    let k = sample.k();
    if p_max >= t_len {
        return Err(Error::InsufficientData {
            rows: 0,
            params: n_params(p_max, k),
        });
    }
    let n = t_len - p_max;
    let m = n_params(p_max, k);
    if n <= m {
        return Err(Error::InsufficientData { rows: n, params: m });
    }
    // Nested column order [x_t, y_{t−1}, x_{t−1}, y_{t−2}, …] so every
    // candidate is a leading block of a single factorization.
    let mut data = Vec::with_capacity(n * m);
    for i in 0..k {
        data.extend_from_slice(&sample.x.column(i).as_slice()[p_max..]);
    }
    for j in 1..=p_max {
        data.extend_from_slice(&sample.y[p_max - j..t_len - j]);
        for i in 0..k {
            data.extend_from_slice(&sample.x.column(i).as_slice()[p_max - j..t_len - j]);
        }
    }
    let qr = HouseholderQr::new(data, n, m);
    let mut qty = sample.y[p_max..].to_vec();
    let yy: f64 = qty.iter().map(|v| v * v).sum();
    qr.apply_qt(&mut qty);

    // tail[c] = Σ_{i ≥ c} (Q'y)_i²
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + qty[i] * qty[i];
    }
    let diag = qr.r_diag();
    let mut scores = Vec::with_capacity(p_max + 1);
    let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
    let mut seen = 0;
    for p in 0..=p_max {
        let mp = n_params(p, k);
        for d in &diag[seen..mp] {
            dmin = dmin.min(d.abs());
            dmax = dmax.max(d.abs());
        }
        seen = mp;
        if !(dmax > 0.0 && dmin / dmax > RANK_TOLERANCE) {
            scores.push(None);
            continue;
        }
        let sse = tail[mp];
        let score = if sse <= EXACT_FIT_RELATIVE * yy {
            f64::NEG_INFINITY
        } else {
            ic_score(sse, n, p, k, criterion)?
        };
        scores.push(Some(score));
    }
    Ok(scores)
}

/// Criterion values for every `p ∈ 0..=p_max`, candidate `p` fitted on
/// `t = p+1..T` and scored with the full sample size `T`.
pub fn per_order_scores(
    sample: &Sample,
    p_max: usize,
    criterion: Criterion,
) -> Result<Vec<Option<f64>>> {
    let t_len = sample.len();
    let k = sample.k();
    let m = n_params(p_max, k);
    if p_max >= t_len || t_len - p_max <= m {
        return Err(Error::InsufficientData {
            rows: t_len.saturating_sub(p_max),
            params: m,
        });
    }
    let mut scores = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let fit = match fit_fixed_order(sample, p) {
            Ok(fit) => fit,
            Err(Error::RankDeficient { .. }) => {
                scores.push(None);
                continue;
            }
            Err(e) => return Err(e),
        };
        let yy: f64 = sample.y[p..].iter().map(|v| v * v).sum();
        let score = if fit.fit.sse <= EXACT_FIT_RELATIVE * yy {
            f64::NEG_INFINITY
        } else {
            ic_score(fit.fit.sse, t_len, p, k, criterion)?
        };
        scores.push(Some(score));
    }
    Ok(scores)
}

/// Chooses `p ∈ 0..=p_max` by `criterion` on the common sample and refits
/// on `t = p+1..T`.
pub fn select_order(sample: &Sample, p_max: usize, criterion: Criterion) -> Result<DynRegFit> {
    select_order_by(sample, &OrderSearch::new(criterion, p_max))
}

/// [`select_order`] with an explicit scoring sample.
pub fn select_order_by(sample: &Sample, search: &OrderSearch) -> Result<DynRegFit> {
    let criterion = search.criterion;
    if criterion == Criterion::Fixed {
        return Err(Error::InvalidArgument(
            "select_order needs BIC or AIC".into(),
        ));
    }
    let scores = match search.sample {
        IcSample::Common => order_scores(sample, search.p_max, criterion)?,
        IcSample::PerOrder => per_order_scores(sample, search.p_max, criterion)?,
    };
    let mut best: Option<(usize, f64)> = None;
    for (p, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            // Strict comparison keeps the smaller order on ties.
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((p, s));
            }
        }
    }
    let (p, _) = best.ok_or(Error::RankDeficient { ratio: 0.0 })?;
    let mut fit = fit_fixed_order(sample, p)?;
    fit.criterion_used = criterion;
    Ok(fit)
}

/// Fits the dynamic regression with order `p` on `t = p+1..T`.
pub fn fit_fixed_order(sample: &Sample, p: usize) -> Result<DynRegFit> {
    if p >= sample.len() {
        return Err(Error::InsufficientData {
            rows: 0,
            params: n_params(p, sample.k()),
        });
    }
    let (design, response) = build_lagged_design(sample, p, p + 1)?;
    let fit = ols_fit(&design, &response)?;
    Ok(DynRegFit {
        p,
        k: sample.k(),
        theta_hat: fit.beta_hat.clone(),
        n_effective: fit.n_obs,
        fit,
        criterion_used: Criterion::Fixed,
    })
}

/// Classical t test of the contemporaneous coefficient of the first
/// regressor against a standard normal reference.
pub fn dynreg_t_test(fit: &DynRegFit, null_value: f64, level: f64) -> Result<TestResult> {
    dynreg_t_test_with(fit, null_value, level, false)
}

/// As [`dynreg_t_test`]; `student_t` switches the reference to
/// Student-t with `n_effective − m` degrees of freedom.
pub fn dynreg_t_test_with(
    fit: &DynRegFit,
    null_value: f64,
    level: f64,
    student_t: bool,
) -> Result<TestResult> {
    let reference = if student_t {
        Reference::StudentT((fit.n_effective - fit.n_params()) as f64)
    } else {
        Reference::Normal
    };
    let cv = critical_value(reference, level)?;
    let stat = ols_t_stat(&fit.fit, fit.beta_index(0), null_value)?;
    Ok(TestResult::new(stat, cv, TestMethod::DynReg, level))
}

/// One-step conditional forecast
/// `Σφ̂_j y_{T+1−j} + Σβ̂_i x_{i,next} + ΣΣγ̂_{i,j} x_{i,T+1−j}`.
///
/// `history_x` has one column per regressor; its last row is period `T`.
pub fn dynreg_forecast(
    fit: &DynRegFit,
    history_y: &[f64],
    history_x: &DMatrix<f64>,
    x_next: &[f64],
) -> Result<f64> {
    let (p, k) = (fit.p, fit.k);
    if x_next.len() != k || history_x.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "fit has {k} regressors, got x_next of length {} and history with {} columns",
            x_next.len(),
            history_x.ncols()
        )));
    }
    let got = history_y.len().min(history_x.nrows());
    if got < p {
        return Err(Error::InsufficientHistory { needed: p, got });
    }
    let ny = history_y.len();
    let nx = history_x.nrows();
    let mut f = 0.0;
    for (j, phi) in fit.phi().iter().enumerate() {
        f += phi * history_y[ny - 1 - j];
    }
    for (i, (b, xn)) in fit.beta().iter().zip(x_next).enumerate() {
        f += b * xn;
        for (j, g) in fit.gamma(i).iter().enumerate() {
            f += g * history_x[(nx - 1 - j, i)];
        }
    }
    Ok(f)
}

/// [`dynreg_forecast`] for a single regressor.
pub fn dynreg_forecast_single(
    fit: &DynRegFit,
    history_y: &[f64],
    history_x: &[f64],
    x_next: f64,
) -> Result<f64> {
    let hx = DMatrix::from_column_slice(history_x.len(), 1, history_x);
    dynreg_forecast(fit, history_y, &hx, &[x_next])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{simulate, DgpSpec, ShockStream};

    fn toy(t: usize) -> Sample {
        let y: Vec<f64> = (0..t)
            .map(|i| (i as f64 * 0.7).sin() + i as f64 * 0.01)
            .collect();
        let x: Vec<f64> = (0..t).map(|i| (i as f64 * 1.3).cos()).collect();
        Sample::from_columns(y, x).unwrap()
    }

    #[test]
    fn design_matches_index_oracle() {
        let s = toy(5);
        let (d, r) = build_lagged_design(&s, 1, 2).unwrap();
        assert_eq!(d.shape(), (4, 3));
        for row in 0..4 {
            let t = row + 2; // 1-based period
            assert_eq!(d[(row, 0)], s.y[t - 2]);
            assert_eq!(d[(row, 1)], s.x[(t - 1, 0)]);
            assert_eq!(d[(row, 2)], s.x[(t - 2, 0)]);
            assert_eq!(r[row], s.y[t - 1]);
        }
    }

    #[test]
    fn design_order_for_two_regressors() {
        let t = 12;
        let y: Vec<f64> = (0..t).map(|i| i as f64).collect();
        let x = DMatrix::from_fn(t, 2, |i, j| 100.0 * (j + 1) as f64 + i as f64);
        let s = Sample::new(y, x).unwrap();
        let (d, _) = build_lagged_design(&s, 2, 3).unwrap();
        // row 0 is period t = 3 (index 2)
        let expected = [1.0, 0.0, 102.0, 202.0, 101.0, 100.0, 201.0, 200.0];
        for (c, e) in expected.iter().enumerate() {
            assert_eq!(d[(0, c)], *e, "column {c}");
        }
    }

    #[test]
    fn design_preconditions() {
        let s = toy(5);
        assert!(matches!(
            build_lagged_design(&s, 1, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_lagged_design(&s, 1, 3),
            Err(Error::InsufficientData { rows: 3, params: 3 })
        ));
    }

    #[test]
    fn zero_order_is_static_ols() {
        let s = toy(30);
        let dyn_fit = fit_fixed_order(&s, 0).unwrap();
        let ols = ols_fit(&s.x, &s.y).unwrap();
        assert_eq!(dyn_fit.fit, ols);
        assert_eq!(dyn_fit.theta_hat.len(), 1);
    }

    #[test]
    fn identical_series_are_collinear_beyond_order_zero() {
        let x: Vec<f64> = (0..20).map(|i| ((i * i) % 7) as f64 - 3.0).collect();
        let s = Sample::from_columns(x.clone(), x).unwrap();
        let (d, r) = build_lagged_design(&s, 2, 3).unwrap();
        for row in 0..r.len() {
            assert_eq!(r[row], d[(row, 2)]);
        }
        assert!(matches!(ols_fit(&d, &r), Err(Error::RankDeficient { .. })));
        let p0 = fit_fixed_order(&s, 0).unwrap();
        assert!((p0.theta_hat[0] - 1.0).abs() < 1e-14);
        assert!(p0.fit.sse < 1e-20);
    }

    #[test]
    fn ic_penalties() {
        let b = ic_score(1.0, 200, 0, 1, Criterion::Bic).unwrap();
        assert!((b - 200f64.ln()).abs() < 1e-12);
        let diff = ic_score(3.0, 200, 3, 1, Criterion::Bic).unwrap()
            - ic_score(3.0, 200, 3, 1, Criterion::Aic).unwrap();
        assert!((diff - (200f64.ln() - 2.0) * 7.0).abs() < 1e-9);
        assert!((diff - 23.088).abs() < 0.01);
        for n in 8..100 {
            let b = ic_score(2.0, n, 2, 1, Criterion::Bic).unwrap();
            let a = ic_score(2.0, n, 2, 1, Criterion::Aic).unwrap();
            assert!(b >= a);
        }
        assert_eq!(ic_score(0.0, 10, 0, 1, Criterion::Bic), Err(Error::ZeroSse));
    }

    #[test]
    fn nested_scores_match_direct_fits() {
        let spec = DgpSpec::ar(0.8, 120);
        let s = simulate(&spec, &ShockStream::new(11, 0), 0).unwrap();
        let p_max = 6;
        let scores = order_scores(&s, p_max, Criterion::Bic).unwrap();
        assert_eq!(scores.len(), p_max + 1);
        for (p, score) in scores.iter().enumerate() {
            let (d, r) = build_lagged_design(&s, p, p_max + 1).unwrap();
            let fit = ols_fit(&d, &r).unwrap();
            let direct = ic_score(fit.sse, r.len(), p, 1, Criterion::Bic).unwrap();
            let nested = score.unwrap();
            assert!(
                (direct - nested).abs() < 1e-8 * direct.abs().max(1.0),
                "p={p}"
            );
        }
    }

    #[test]
    fn per_order_scores_use_own_rows_and_full_t() {
        let s = simulate(&DgpSpec::ar(0.8, 80), &ShockStream::new(12, 0), 0).unwrap();
        let p_max = 5;
        let scores = per_order_scores(&s, p_max, Criterion::Aic).unwrap();
        assert_eq!(scores.len(), p_max + 1);
        for (p, score) in scores.iter().enumerate() {
            let (d, r) = build_lagged_design(&s, p, p + 1).unwrap();
            assert_eq!(r.len(), 80 - p);
            let sse = ols_fit(&d, &r).unwrap().sse;
            let direct = 80.0 * sse.ln() + 2.0 * (2 * p + 1) as f64;
            assert!((direct - score.unwrap()).abs() < 1e-9 * direct.abs());
        }
        let search = OrderSearch {
            sample: IcSample::PerOrder,
            ..OrderSearch::new(Criterion::Aic, p_max)
        };
        let fit = select_order_by(&s, &search).unwrap();
        let best = (0..=p_max)
            .min_by(|&a, &b| scores[a].unwrap().total_cmp(&scores[b].unwrap()))
            .unwrap();
        assert_eq!(fit.p, best);
        assert_eq!(IcSample::parse("per_order"), Some(IcSample::PerOrder));
        assert_eq!(
            IcSample::parse(IcSample::Common.label()),
            Some(IcSample::Common)
        );
    }

    #[test]
    fn exact_fit_prefers_smallest_order() {
        // y = 2x exactly: every order fits perfectly once x lags are present.
        let x: Vec<f64> = (0..60).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let s = Sample::from_columns(y, x).unwrap();
        let fit = select_order(&s, 5, Criterion::Bic).unwrap();
        assert_eq!(fit.p, 0);
        assert_eq!(fit.criterion_used, Criterion::Bic);
    }

    #[test]
    fn t_test_at_estimate_is_zero() {
        let s = simulate(&DgpSpec::ar(0.5, 100), &ShockStream::new(3, 1), 0).unwrap();
        let fit = select_order(&s, default_p_max(100), Criterion::Bic).unwrap();
        let b = fit.beta()[0];
        let res = dynreg_t_test(&fit, b, 0.05).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert!(!res.reject);
        let st = dynreg_t_test_with(&fit, b + 10.0, 0.05, true).unwrap();
        assert!(st.critical_value > res.critical_value);
        assert!(st.reject);
    }

    #[test]
    fn forecast_with_known_parameters() {
        let rho = 0.6;
        let fit = DynRegFit {
            p: 1,
            k: 1,
            theta_hat: vec![rho, 1.0, -rho],
            fit: ols_fit(
                &DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]),
                &[1.0, 2.0, 3.5],
            )
            .unwrap(),
            criterion_used: Criterion::Fixed,
            n_effective: 3,
        };
        let (y_t, x_t, x_next) = (1.7, 0.4, -0.3);
        let u_t = y_t - x_t;
        let f = dynreg_forecast_single(&fit, &[0.0, y_t], &[0.0, x_t], x_next).unwrap();
        assert!((f - (x_next + rho * u_t)).abs() < 1e-14);
        assert_eq!(
            dynreg_forecast_single(&fit, &[0.0], &[0.0], 0.0).unwrap(),
            0.0
        );
        assert!(matches!(
            dynreg_forecast_single(&fit, &[], &[], 1.0),
            Err(Error::InsufficientHistory { needed: 1, got: 0 })
        ));
    }

    #[test]
    fn order_zero_forecast_is_beta_times_x() {
        let s = toy(30);
        let fit = fit_fixed_order(&s, 0).unwrap();
        let f = dynreg_forecast_single(&fit, &[], &[], 2.5).unwrap();
        assert_eq!(f, fit.theta_hat[0] * 2.5);
    }

    #[test]
    fn default_p_max_values() {
        assert_eq!(default_p_max(50), 10);
        assert_eq!(default_p_max(200), 30);
        assert_eq!(default_p_max(2500), 30);
    }
}
