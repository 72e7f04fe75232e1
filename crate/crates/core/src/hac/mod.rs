//! Long-run variance estimators for `x_t û_t`, bandwidth rules, and
//! HAC t tests.
//!
//! Two estimator families are provided:
//!
//! * Bartlett lag-window ([`bartlett_lrv`]):
//!   `Ω̂ = Γ̂₀ + Σ_{τ=1}^{h} (1 − τ/(h+1)) (Γ̂_τ + Γ̂_τ')`,
//!   `Γ̂_τ = (1/T) Σ_t û_t x_t x_{t−τ}' û_{t−τ}`.
//! * Equally weighted cosine projections ([`cosine_lrv`]):
//!   `Ω̂ = (1/ν) Σ_{j=1}^{ν} Λ̂_j Λ̂_j'`,
//!   `Λ̂_j = √(2/T) Σ_t x_t û_t cos(π j (t − ½)/T)`.
//!
//! No prewhitening and no small-sample rescaling is applied.

mod fixed_b;

pub use fixed_b::{
    fixed_b_critical_value, kv_critical_value, kv_critical_value_with, FixedBParams,
    DEFAULT_FIXED_B_DRAWS, DEFAULT_FIXED_B_GRID, DEFAULT_FIXED_B_SEED,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::regression::{ols_t_stat, ratio_or_zero, RegressionFit};

/// Default coefficient of the cosine-count rule `ν = ⌊c T^{2/3}⌋`.
pub const M_LLSW_COEFFICIENT: f64 = 0.41;

// Guards floors of values that are integers in exact arithmetic.
const FLOOR_EPS: f64 = 1e-9;

fn floor_usize(v: f64) -> usize {
    (v + FLOOR_EPS).floor().max(0.0) as usize
}

/// Truncation-lag / cosine-count rules, each a pure function of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandwidthRule {
    /// `⌊4 (T/100)^{2/9}⌋ + 1`
    Nw,
    /// `⌊0.75 T^{1/3}⌋ + 1`
    NwA,
    /// `⌊1.3 T^{1/2}⌋ + 1`
    NwLlsw,
    /// `T`
    NwKv,
    /// `⌊0.41 T^{2/3}⌋` cosines (at least 1)
    MLlsw,
}

impl BandwidthRule {
    pub const ALL: [BandwidthRule; 5] = [
        BandwidthRule::Nw,
        BandwidthRule::NwA,
        BandwidthRule::NwLlsw,
        BandwidthRule::NwKv,
        BandwidthRule::MLlsw,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BandwidthRule::Nw => "NW",
            BandwidthRule::NwA => "NW-A",
            BandwidthRule::NwLlsw => "NW-LLSW",
            BandwidthRule::NwKv => "NW-KV",
            BandwidthRule::MLlsw => "M-LLSW",
        }
    }

    pub fn is_cosine(self) -> bool {
        matches!(self, BandwidthRule::MLlsw)
    }
}

/// Bandwidth for `rule` at sample size `t`.
pub fn bandwidth(rule: BandwidthRule, t: usize) -> usize {
    bandwidth_with(rule, t, M_LLSW_COEFFICIENT)
}

/// As [`bandwidth`], with an explicit cosine-count coefficient.
pub fn bandwidth_with(rule: BandwidthRule, t: usize, m_llsw_coefficient: f64) -> usize {
    let tf = t as f64;
    match rule {
        BandwidthRule::Nw => floor_usize(4.0 * (tf / 100.0).powf(2.0 / 9.0)) + 1,
        BandwidthRule::NwA => floor_usize(0.75 * tf.cbrt()) + 1,
        BandwidthRule::NwLlsw => floor_usize(1.3 * tf.sqrt()) + 1,
        BandwidthRule::NwKv => t,
        BandwidthRule::MLlsw => {
            let c = tf.cbrt();
            floor_usize(m_llsw_coefficient * c * c).max(1)
        }
    }
}

/// An estimate of the long-run variance of `x_t u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LrvEstimate {
    pub omega_hat: DMatrix<f64>,
    /// Rule that produced the bandwidth; `None` when the caller passed it.
    pub method: Option<BandwidthRule>,
    pub bandwidth_used: usize,
    /// Degrees of freedom for the test reference distribution (cosine
    /// estimator only).
    pub dof_for_test: Option<usize>,
}

impl LrvEstimate {
    pub fn with_method(mut self, rule: BandwidthRule) -> Self {
        self.method = Some(rule);
        self
    }
}

/// Row-wise products `x_t û_t`, column-major `T × k`.
fn scores(fit: &RegressionFit, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let t = fit.residuals.len();
    if x.nrows() != t {
        return Err(Error::DimensionMismatch(format!(
            "x has {} rows, residuals have {t}",
            x.nrows()
        )));
    }
    let mut v = x.clone();
    for mut col in v.column_iter_mut() {
        for (vi, u) in col.iter_mut().zip(&fit.residuals) {
            *vi *= u;
        }
    }
    Ok(v)
}

/// Bartlett lag-window estimator with truncation lag `h` (0 ≤ h ≤ T).
pub fn bartlett_lrv(fit: &RegressionFit, x: &DMatrix<f64>, h: usize) -> Result<LrvEstimate> {
    let v = scores(fit, x)?;
    let (t, k) = v.shape();
    if h > t {
        return Err(Error::BandwidthOutOfRange {
            bandwidth: h,
            min: 0,
            max: t,
        });
    }
    let tf = t as f64;
    let omega = if k == 1 {
        let s = v.as_slice();
        let mut total = s.iter().map(|a| a * a).sum::<f64>();
        // Γ̂_T is an empty sum, so lags stop at T-1.
        for tau in 1..=h.min(t.saturating_sub(1)) {
            let w = 1.0 - tau as f64 / (h as f64 + 1.0);
            let gamma = crate::linalg::dot(&s[tau..], &s[..t - tau]);
            total += 2.0 * w * gamma;
        }
        DMatrix::from_element(1, 1, total / tf)
    } else {
        let mut omega = v.tr_mul(&v);
        for tau in 1..=h.min(t.saturating_sub(1)) {
            let w = 1.0 - tau as f64 / (h as f64 + 1.0);
            let lead = v.rows(tau, t - tau);
            let lag = v.rows(0, t - tau);
            let gamma = lead.tr_mul(&lag);
            omega += (&gamma + gamma.transpose()) * w;
        }
        omega / tf
    };
    Ok(LrvEstimate {
        omega_hat: omega,
        method: None,
        bandwidth_used: h,
        dof_for_test: None,
    })
}

/// Precomputed `cos(π j (t − ½)/T)` for `j = 1..ν`, `t = 1..T`.
#[derive(Debug, Clone)]
pub struct CosineBasis {
    t: usize,
    nu: usize,
    /// Row `j-1` holds the ν-th basis function scaled by `√(2/T)`.
    table: Vec<f64>,
}

impl CosineBasis {
    pub fn new(t: usize, nu: usize) -> Result<Self> {
        if nu < 1 || nu + 1 > t {
            return Err(Error::BandwidthOutOfRange {
                bandwidth: nu,
                min: 1,
                max: t.saturating_sub(1),
            });
        }
        let tf = t as f64;
        let scale = (2.0 / tf).sqrt();
        let mut table = Vec::with_capacity(nu * t);
        for j in 1..=nu {
            for s in 1..=t {
                let arg = std::f64::consts::PI * j as f64 * (s as f64 - 0.5) / tf;
                table.push(scale * arg.cos());
            }
        }
        Ok(Self { t, nu, table })
    }

    pub fn len(&self) -> usize {
        self.t
    }

    pub fn is_empty(&self) -> bool {
        self.t == 0
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    fn row(&self, j: usize) -> &[f64] {
        &self.table[j * self.t..(j + 1) * self.t]
    }
}

/// Cosine-projection estimator with `nu` cosines (1 ≤ ν ≤ T−1).
pub fn cosine_lrv(fit: &RegressionFit, x: &DMatrix<f64>, nu: usize) -> Result<LrvEstimate> {
    let basis = CosineBasis::new(fit.residuals.len(), nu)?;
    cosine_lrv_with_basis(fit, x, &basis)
}

/// As [`cosine_lrv`] with a reusable basis.
pub fn cosine_lrv_with_basis(
    fit: &RegressionFit,
    x: &DMatrix<f64>,
    basis: &CosineBasis,
) -> Result<LrvEstimate> {
    let v = scores(fit, x)?;
    let (t, k) = v.shape();
    if basis.len() != t {
        return Err(Error::DimensionMismatch(format!(
            "cosine basis built for T = {}, sample has T = {t}",
            basis.len()
        )));
    }
    let mut omega = DMatrix::zeros(k, k);
    let mut lambda = vec![0.0; k];
    for j in 0..basis.nu() {
        let c = basis.row(j);
        for (i, l) in lambda.iter_mut().enumerate() {
            *l = crate::linalg::dot(v.column(i).as_slice(), c);
        }
        for a in 0..k {
            for b in 0..k {
                omega[(a, b)] += lambda[a] * lambda[b];
            }
        }
    }
    Ok(LrvEstimate {
        omega_hat: omega / basis.nu() as f64,
        method: None,
        bandwidth_used: basis.nu(),
        dof_for_test: Some(basis.nu()),
    })
}

/// Bandwidth from `rule`, then the matching estimator, tagged with `rule`.
pub fn estimate_lrv(
    rule: BandwidthRule,
    fit: &RegressionFit,
    x: &DMatrix<f64>,
    m_llsw_coefficient: f64,
) -> Result<LrvEstimate> {
    let t = fit.residuals.len();
    let bw = bandwidth_with(rule, t, m_llsw_coefficient);
    let est = if rule.is_cosine() {
        cosine_lrv(fit, x, bw)?
    } else {
        bartlett_lrv(fit, x, bw)?
    };
    Ok(est.with_method(rule))
}

/// Test procedure label carried by a [`TestResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestMethod {
    /// Classical OLS standard error.
    Ols,
    Hac(BandwidthRule),
    /// HAC with a caller-chosen bandwidth.
    HacCustom,
    DynReg,
}

impl TestMethod {
    /// The seven procedures compared in the experiments, in table order.
    pub const STANDARD: [TestMethod; 7] = [
        TestMethod::Ols,
        TestMethod::Hac(BandwidthRule::Nw),
        TestMethod::Hac(BandwidthRule::NwA),
        TestMethod::Hac(BandwidthRule::NwLlsw),
        TestMethod::Hac(BandwidthRule::NwKv),
        TestMethod::Hac(BandwidthRule::MLlsw),
        TestMethod::DynReg,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TestMethod::Ols => "OLS",
            TestMethod::Hac(rule) => rule.label(),
            TestMethod::HacCustom => "HAC",
            TestMethod::DynReg => "DynReg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Some(match norm.as_str() {
            "ols" => TestMethod::Ols,
            "nw" => TestMethod::Hac(BandwidthRule::Nw),
            "nw-a" => TestMethod::Hac(BandwidthRule::NwA),
            "nw-llsw" => TestMethod::Hac(BandwidthRule::NwLlsw),
            "nw-kv" => TestMethod::Hac(BandwidthRule::NwKv),
            "m-llsw" => TestMethod::Hac(BandwidthRule::MLlsw),
            "dynreg" => TestMethod::DynReg,
            _ => return None,
        })
    }
}

impl From<Option<BandwidthRule>> for TestMethod {
    fn from(rule: Option<BandwidthRule>) -> Self {
        rule.map_or(TestMethod::HacCustom, TestMethod::Hac)
    }
}

/// Outcome of a two-sided t test of `H0: β_j = β_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub reject: bool,
    pub method: TestMethod,
    pub nominal_level: f64,
}

impl TestResult {
    pub fn new(statistic: f64, critical_value: f64, method: TestMethod, level: f64) -> Self {
        Self {
            statistic,
            critical_value,
            reject: statistic.abs() > critical_value,
            method,
            nominal_level: level,
        }
    }
}

/// Reference distribution for a two-sided critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Normal,
    StudentT(f64),
    /// Simulated Bartlett fixed-b (b = 1) limit.
    FixedB,
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "level {level} not in (0, 1)"
        )))
    }
}

/// Two-sided level-`level` critical value.
pub fn critical_value(reference: Reference, level: f64) -> Result<f64> {
    check_level(level)?;
    let p = 1.0 - level / 2.0;
    Ok(match reference {
        Reference::Normal => Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(p),
        Reference::StudentT(dof) => StudentsT::new(0.0, 1.0, dof)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .inverse_cdf(p),
        Reference::FixedB => kv_critical_value(level),
    })
}

/// Reference distribution implied by how `lrv` was produced: fixed-b for
/// `h = T` Bartlett, Student-t(ν) for cosine estimators, normal otherwise.
pub fn reference_for(lrv: &LrvEstimate) -> Reference {
    match (lrv.method, lrv.dof_for_test) {
        (Some(BandwidthRule::NwKv), _) => Reference::FixedB,
        (_, Some(nu)) => Reference::StudentT(nu as f64),
        _ => Reference::Normal,
    }
}

/// HAC t statistic `(β̂_j − β_0) / sqrt([Q̂⁻¹ Ω̂ Q̂⁻¹]_jj / T)`.
pub fn hac_statistic(
    fit: &RegressionFit,
    lrv: &LrvEstimate,
    coef_index: usize,
    null_value: f64,
) -> Result<f64> {
    fit.check_index(coef_index)?;
    let m = fit.n_params();
    if lrv.omega_hat.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "Ω̂ is {:?}, fit has {m} coefficients",
            lrv.omega_hat.shape()
        )));
    }
    let qinv = fit.q_inverse()?;
    let sandwich = &qinv * &lrv.omega_hat * &qinv;
    let var = sandwich[(coef_index, coef_index)] / fit.n_obs as f64;
    if var < 0.0 {
        return Err(Error::NonPsdLrv(var));
    }
    Ok(ratio_or_zero(
        fit.beta_hat[coef_index] - null_value,
        var.sqrt(),
    ))
}

/// HAC t test with the per-method reference distribution.
pub fn hac_t_test(
    fit: &RegressionFit,
    lrv: &LrvEstimate,
    coef_index: usize,
    null_value: f64,
    level: f64,
) -> Result<TestResult> {
    let cv = critical_value(reference_for(lrv), level)?;
    hac_t_test_with(fit, lrv, coef_index, null_value, level, cv)
}

/// HAC t test against an explicit critical value.
pub fn hac_t_test_with(
    fit: &RegressionFit,
    lrv: &LrvEstimate,
    coef_index: usize,
    null_value: f64,
    level: f64,
    critical: f64,
) -> Result<TestResult> {
    check_level(level)?;
    let stat = hac_statistic(fit, lrv, coef_index, null_value)?;
    Ok(TestResult::new(stat, critical, lrv.method.into(), level))
}

/// Classical OLS t test with a standard normal reference.
pub fn ols_t_test(
    fit: &RegressionFit,
    coef_index: usize,
    null_value: f64,
    level: f64,
) -> Result<TestResult> {
    let cv = critical_value(Reference::Normal, level)?;
    let stat = ols_t_stat(fit, coef_index, null_value)?;
    Ok(TestResult::new(stat, cv, TestMethod::Ols, level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::ols_fit;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fit_from(x: &[f64], u: &[f64]) -> (RegressionFit, DMatrix<f64>) {
        // A fit whose residuals are exactly `u`: only residuals and q_hat
        // matter to the estimators.
        let n = x.len();
        let xm = DMatrix::from_column_slice(n, 1, x);
        let q = xm.tr_mul(&xm) / n as f64;
        (
            RegressionFit {
                beta_hat: vec![1.0],
                residuals: u.to_vec(),
                q_hat: q,
                sigma2_hat: 1.0,
                sse: u.iter().map(|v| v * v).sum(),
                n_obs: n,
            },
            xm,
        )
    }

    /// Σ_{|τ|≤h} w(τ) (1/T) Σ_t v_t v_{t−τ} with explicit double loops.
    fn bartlett_oracle(x: &[f64], u: &[f64], h: usize) -> f64 {
        let t = x.len();
        let mut total = 0.0;
        for tau in -(h as i64)..=(h as i64) {
            let w = 1.0 - (tau.unsigned_abs() as f64) / (h as f64 + 1.0);
            let mut g = 0.0;
            for s in 0..t as i64 {
                let r = s - tau;
                if r >= 0 && r < t as i64 {
                    g += u[s as usize] * x[s as usize] * x[r as usize] * u[r as usize];
                }
            }
            total += w * g / t as f64;
        }
        total
    }

    #[test]
    fn bandwidth_values() {
        assert_eq!(bandwidth(BandwidthRule::Nw, 200), 5);
        assert_eq!(bandwidth(BandwidthRule::NwLlsw, 200), 19);
        assert_eq!(bandwidth(BandwidthRule::NwKv, 600), 600);
        assert_eq!(bandwidth(BandwidthRule::Nw, 50), 4);
        assert_eq!(bandwidth(BandwidthRule::NwA, 50), 3);
        assert_eq!(bandwidth(BandwidthRule::MLlsw, 200), 14);
        assert_eq!(bandwidth_with(BandwidthRule::MLlsw, 200, 0.4), 13);
    }

    #[test]
    fn bandwidth_at_least_one_and_monotone() {
        for rule in BandwidthRule::ALL {
            let mut prev = 0;
            for t in 2..3000 {
                let b = bandwidth(rule, t);
                assert!(b >= 1, "{rule:?} at {t}");
                if rule != BandwidthRule::MLlsw {
                    assert!(b >= prev, "{rule:?} decreases at {t}");
                }
                prev = b;
            }
        }
    }

    #[test]
    fn zero_lag_is_heteroskedasticity_term() {
        let x = [1.0, 2.0, -1.0, 0.5];
        let u = [0.3, -0.2, 0.1, 0.4];
        let (fit, xm) = fit_from(&x, &u);
        let est = bartlett_lrv(&fit, &xm, 0).unwrap();
        let direct: f64 = x.iter().zip(&u).map(|(a, b)| (a * b).powi(2)).sum::<f64>() / 4.0;
        assert!((est.omega_hat[(0, 0)] - direct).abs() < 1e-15);
    }

    #[test]
    fn zero_residuals_give_zero() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (fit, xm) = fit_from(&x, &[0.0; 5]);
        assert_eq!(bartlett_lrv(&fit, &xm, 3).unwrap().omega_hat[(0, 0)], 0.0);
        assert_eq!(cosine_lrv(&fit, &xm, 2).unwrap().omega_hat[(0, 0)], 0.0);
    }

    #[test]
    fn bartlett_matches_nested_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let u: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (fit, xm) = fit_from(&x, &u);
        for h in 0..=6 {
            let est = bartlett_lrv(&fit, &xm, h).unwrap().omega_hat[(0, 0)];
            let oracle = bartlett_oracle(&x, &u, h);
            assert!((est - oracle).abs() < 1e-12, "h={h}: {est} vs {oracle}");
        }
    }

    #[test]
    fn cosine_matches_direct_evaluation() {
        // v_t = (1, -1, 1, -1), T = 4, ν = 2.
        let x = [1.0, 1.0, 1.0, 1.0];
        let u = [1.0, -1.0, 1.0, -1.0];
        let (fit, xm) = fit_from(&x, &u);
        let est = cosine_lrv(&fit, &xm, 2).unwrap();
        let lam = |j: f64| -> f64 {
            (0.5f64).sqrt()
                * (1..=4)
                    .map(|t| u[t - 1] * (std::f64::consts::PI * j * (t as f64 - 0.5) / 4.0).cos())
                    .sum::<f64>()
        };
        let oracle = (lam(1.0).powi(2) + lam(2.0).powi(2)) / 2.0;
        assert!((est.omega_hat[(0, 0)] - oracle).abs() < 1e-12);
        assert_eq!(est.dof_for_test, Some(2));
    }

    #[test]
    fn bandwidth_range_errors() {
        let (fit, xm) = fit_from(&[1.0, 2.0, 3.0], &[0.1, 0.2, 0.3]);
        assert!(matches!(
            bartlett_lrv(&fit, &xm, 4),
            Err(Error::BandwidthOutOfRange { .. })
        ));
        assert!(matches!(
            cosine_lrv(&fit, &xm, 3),
            Err(Error::BandwidthOutOfRange { .. })
        ));
        assert!(matches!(
            cosine_lrv(&fit, &xm, 0),
            Err(Error::BandwidthOutOfRange { .. })
        ));
    }

    #[test]
    fn centered_null_never_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..40).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.random_range(-1.0..1.0)).collect();
        let xm = DMatrix::from_column_slice(40, 1, &x);
        let fit = ols_fit(&xm, &y).unwrap();
        for rule in [
            BandwidthRule::Nw,
            BandwidthRule::NwLlsw,
            BandwidthRule::MLlsw,
        ] {
            let lrv = estimate_lrv(rule, &fit, &xm, M_LLSW_COEFFICIENT).unwrap();
            for level in [0.01, 0.05, 0.5] {
                let res = hac_t_test(&fit, &lrv, 0, fit.beta_hat[0], level).unwrap();
                assert_eq!(res.statistic, 0.0);
                assert!(!res.reject);
            }
        }
    }

    #[test]
    fn negative_variance_is_an_error() {
        let (fit, _) = fit_from(&[1.0, 2.0, 3.0], &[0.1, 0.2, 0.3]);
        let lrv = LrvEstimate {
            omega_hat: DMatrix::from_element(1, 1, -1.0),
            method: None,
            bandwidth_used: 0,
            dof_for_test: None,
        };
        assert!(matches!(
            hac_t_test_with(&fit, &lrv, 0, 0.0, 0.05, 1.96),
            Err(Error::NonPsdLrv(_))
        ));
    }

    #[test]
    fn reference_selection() {
        let base = LrvEstimate {
            omega_hat: DMatrix::from_element(1, 1, 1.0),
            method: Some(BandwidthRule::Nw),
            bandwidth_used: 5,
            dof_for_test: None,
        };
        assert_eq!(reference_for(&base), Reference::Normal);
        let cos = LrvEstimate {
            method: Some(BandwidthRule::MLlsw),
            dof_for_test: Some(14),
            ..base.clone()
        };
        assert_eq!(reference_for(&cos), Reference::StudentT(14.0));
        let kv = base.with_method(BandwidthRule::NwKv);
        assert_eq!(reference_for(&kv), Reference::FixedB);
        let z = critical_value(Reference::Normal, 0.05).unwrap();
        assert!((z - 1.959963984540054).abs() < 1e-9);
        let t14 = critical_value(Reference::StudentT(14.0), 0.05).unwrap();
        assert!((t14 - 2.144786687916925).abs() < 1e-6);
    }

    #[test]
    fn method_labels_round_trip() {
        for m in TestMethod::STANDARD {
            assert_eq!(TestMethod::parse(m.label()), Some(m));
        }
    }

    proptest! {
        #[test]
        fn estimators_are_psd(
            pairs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..40),
            hfrac in 0.0f64..1.0,
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let u: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let t = x.len();
            let (fit, xm) = fit_from(&x, &u);
            let h = ((t as f64) * hfrac) as usize;
            let trace: f64 = x.iter().zip(&u).map(|(a, b)| (a * b).powi(2)).sum::<f64>() / t as f64;
            let b = bartlett_lrv(&fit, &xm, h).unwrap().omega_hat[(0, 0)];
            prop_assert!(b >= -1e-10 * trace.max(1e-300));
            let nu = 1 + ((t - 2) as f64 * hfrac) as usize;
            let c = cosine_lrv(&fit, &xm, nu).unwrap().omega_hat[(0, 0)];
            prop_assert!(c >= 0.0);
        }

        #[test]
        fn bivariate_estimators_are_symmetric_psd(
            rows in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), 4..30),
            h in 0usize..10,
        ) {
            let t = rows.len();
            let x = DMatrix::from_fn(t, 2, |i, j| if j == 0 { rows[i].0 } else { rows[i].1 });
            let u: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let fit = RegressionFit {
                beta_hat: vec![0.0, 0.0],
                residuals: u,
                q_hat: x.tr_mul(&x) / t as f64,
                sigma2_hat: 1.0,
                sse: 1.0,
                n_obs: t,
            };
            for est in [
                bartlett_lrv(&fit, &x, h.min(t)).unwrap(),
                cosine_lrv(&fit, &x, (h % (t - 1)).max(1)).unwrap(),
            ] {
                let o = &est.omega_hat;
                prop_assert!((o[(0, 1)] - o[(1, 0)]).abs() < 1e-12 * (1.0 + o.abs().max()));
                let sym = (o + o.transpose()) * 0.5;
                let eig = sym.symmetric_eigenvalues();
                let tr = o.trace().abs().max(1e-300);
                prop_assert!(eig.min() >= -1e-10 * tr, "eigs {:?}", eig);
            }
        }
    }
}
