//! Ordinary least squares and the sample container shared by every estimator.

use nalgebra::DMatrix;

use crate::dgp::DgpSpec;
use crate::error::{Error, Result};
use crate::linalg::HouseholderQr;

/// Smallest admissible ratio of extreme singular values of a design.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Provenance of a simulated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeta {
    pub spec: DgpSpec,
    pub seed: u64,
    pub replication: u64,
}

/// One realization of `(y, x)`, rows indexed by time `t = 1..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub y: Vec<f64>,
    /// `T × k` regressor matrix.
    pub x: DMatrix<f64>,
    /// Disturbance path, when known (simulated data).
    pub u: Option<Vec<f64>>,
    pub meta: Option<SampleMeta>,
}

impl Sample {
    pub fn new(y: Vec<f64>, x: DMatrix<f64>) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "y has {} rows, x has {}",
                y.len(),
                x.nrows()
            )));
        }
        if y.len() < 2 {
            return Err(Error::InsufficientData {
                rows: y.len(),
                params: x.ncols(),
            });
        }
        if x.ncols() == 0 {
            return Err(Error::DimensionMismatch("x has no columns".into()));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "sample contains non-finite values".into(),
            ));
        }
        Ok(Self {
            y,
            x,
            u: None,
            meta: None,
        })
    }

    /// Single-regressor convenience constructor.
    pub fn from_columns(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let n = x.len();
        Self::new(y, DMatrix::from_vec(n, 1, x))
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of regressors `k`.
    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    /// First `n` observations.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            y: self.y[..n].to_vec(),
            x: self.x.rows(0, n).into_owned(),
            u: self.u.as_ref().map(|u| u[..n].to_vec()),
            meta: self.meta.clone(),
        }
    }
}

/// Result of an OLS fit of `response` on `design`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub beta_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `(1/n) Σ z_t z_t'`.
    pub q_hat: DMatrix<f64>,
    /// `sse / (n - m)`.
    pub sigma2_hat: f64,
    pub sse: f64,
    pub n_obs: usize,
}

impl RegressionFit {
    pub fn n_params(&self) -> usize {
        self.beta_hat.len()
    }

    /// Inverse of `q_hat`.
    pub fn q_inverse(&self) -> Result<DMatrix<f64>> {
        invert_spd(&self.q_hat)
    }

    /// Classical standard error `sqrt(σ̂² [Q̂⁻¹]_jj / n)`.
    pub fn classical_se(&self, coef_index: usize) -> Result<f64> {
        self.check_index(coef_index)?;
        let qinv = self.q_inverse()?;
        Ok((self.sigma2_hat * qinv[(coef_index, coef_index)] / self.n_obs as f64).sqrt())
    }

    pub(crate) fn check_index(&self, coef_index: usize) -> Result<()> {
        if coef_index >= self.beta_hat.len() {
            return Err(Error::InvalidArgument(format!(
                "coefficient index {coef_index} out of range for {} coefficients",
                self.beta_hat.len()
            )));
        }
        Ok(())
    }
}

pub(crate) fn invert_spd(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if q.nrows() == 1 {
        let v = q[(0, 0)];
        return if v > 0.0 && v.is_finite() {
            Ok(DMatrix::from_element(1, 1, 1.0 / v))
        } else {
            Err(Error::SingularQ)
        };
    }
    q.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::SingularQ)
}

/// Least-squares fit via Householder QR.
pub fn ols_fit(design: &DMatrix<f64>, response: &[f64]) -> Result<RegressionFit> {
    let (n, m) = design.shape();
    if response.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows, response has {}",
            response.len()
        )));
    }
    if m == 0 {
        return Err(Error::DimensionMismatch("design has no columns".into()));
    }
    if n <= m {
        return Err(Error::InsufficientData { rows: n, params: m });
    }
    let qr = HouseholderQr::from_matrix(design);
    check_rank(&qr)?;

    let mut qty = response.to_vec();
    qr.apply_qt(&mut qty);
    let mut beta_hat = qr.back_solve(&qty, m);
    let (mut residuals, mut sse) = residuals_of(design, response, &beta_hat);

    // One step of iterative refinement; recovers exact fits exactly.
    let mut qtr = residuals.clone();
    qr.apply_qt(&mut qtr);
    let delta = qr.back_solve(&qtr, m);
    let refined: Vec<f64> = beta_hat.iter().zip(&delta).map(|(b, d)| b + d).collect();
    let (r2, sse2) = residuals_of(design, response, &refined);
    if sse2 < sse {
        beta_hat = refined;
        residuals = r2;
        sse = sse2;
    }
    let q_hat = design.tr_mul(design) / n as f64;

    Ok(RegressionFit {
        beta_hat,
        residuals,
        q_hat,
        sigma2_hat: sse / (n - m) as f64,
        sse,
        n_obs: n,
    })
}

fn residuals_of(design: &DMatrix<f64>, response: &[f64], beta: &[f64]) -> (Vec<f64>, f64) {
    let mut residuals = response.to_vec();
    for (j, b) in beta.iter().enumerate() {
        crate::linalg::axpy(-b, design.column(j).as_slice(), &mut residuals);
    }
    let sse = residuals.iter().map(|r| r * r).sum();
    (residuals, sse)
}

fn check_rank(qr: &HouseholderQr) -> Result<()> {
    let m = qr.ncols();
    // R shares its singular values with the design.
    let sv = qr.r_matrix(m).singular_values();
    let max = sv.max();
    let min = sv.min();
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if !(ratio > RANK_TOLERANCE) {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(())
}

/// Classical t statistic for `H0: beta[coef_index] = null_value`.
///
/// Defined as 0 when both the numerator and the standard error vanish.
pub fn ols_t_stat(fit: &RegressionFit, coef_index: usize, null_value: f64) -> Result<f64> {
    let se = fit.classical_se(coef_index)?;
    let diff = fit.beta_hat[coef_index] - null_value;
    Ok(ratio_or_zero(diff, se))
}

pub(crate) fn ratio_or_zero(num: f64, se: f64) -> f64 {
    if num == 0.0 && se == 0.0 {
        0.0
    } else {
        num / se
    }
}
