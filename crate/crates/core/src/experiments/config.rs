use serde::{Deserialize, Serialize};

use crate::dgp::{DgpKind, DgpSpec};
use crate::dynreg::{default_p_max, Criterion, IcSample, OrderSearch};
use crate::error::{Error, Result};
use crate::hac::{FixedBParams, TestMethod, M_LLSW_COEFFICIENT};

pub const DEFAULT_SEED: u64 = 19_620_815;
pub const DEFAULT_REPS: usize = 2000;
pub const DEFAULT_RHOS: [f64; 7] = [0.0, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99];
pub const DEFAULT_TS: [usize; 4] = [50, 200, 600, 2500];
pub const SURFACE_RHOS: [f64; 12] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];
pub const SURFACE_TS: [usize; 7] = [50, 200, 500, 1000, 1500, 2000, 2500];
pub const WEAK_EXO_BETAS: [f64; 2] = [1.0, 0.8];

/// `1.00, 1.025, …, 1.50`.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=20).map(|i| 1.0 + 0.025 * i as f64).collect()
}

/// `0.50, 0.525, …, 1.50`.
pub fn symmetric_beta_grid() -> Vec<f64> {
    (0..=40).map(|i| 0.5 + 0.025 * i as f64).collect()
}

/// Settings shared by every experiment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dgp: DgpKind,
    pub rhos: Vec<f64>,
    pub ts: Vec<usize>,
    pub reps: usize,
    pub criterion: Criterion,
    pub methods: Vec<TestMethod>,
    pub beta_grid: Vec<f64>,
    pub level: f64,
    /// Hypothesized β in every test.
    pub null_value: f64,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// Regressor AR coefficient when it differs from `rho` (MA designs).
    pub rho_x: Option<f64>,
    pub m_llsw_coefficient: f64,
    /// Student-t(n − m) instead of normal reference for the DynReg test.
    pub dynreg_student_t: bool,
    /// Largest candidate lag order; `None` uses `min(⌊T/5⌋, 30)`.
    pub p_max: Option<usize>,
    pub ic_sample: IcSample,
    pub fixed_b: FixedBParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dgp: DgpKind::ArAr,
            rhos: DEFAULT_RHOS.to_vec(),
            ts: DEFAULT_TS.to_vec(),
            reps: DEFAULT_REPS,
            criterion: Criterion::Bic,
            methods: TestMethod::STANDARD.to_vec(),
            beta_grid: default_beta_grid(),
            level: 0.05,
            null_value: 1.0,
            seed: DEFAULT_SEED,
            threads: 0,
            rho_x: None,
            m_llsw_coefficient: M_LLSW_COEFFICIENT,
            dynreg_student_t: false,
            p_max: None,
            ic_sample: IcSample::Common,
            fixed_b: FixedBParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::InvalidArgument(format!(
                "reps = {} < 100",
                self.reps
            )));
        }
        if let Some(r) = self.rhos.iter().find(|r| !(r.abs() < 1.0)) {
            return Err(Error::InvalidArgument(format!("rho = {r} outside (-1, 1)")));
        }
        if let Some(r) = self.rho_x.filter(|r| !(r.abs() < 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "rho_x = {r} outside (-1, 1)"
            )));
        }
        if let Some(t) = self.ts.iter().find(|&&t| t < 20) {
            return Err(Error::InvalidArgument(format!("T = {t} < 20")));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "level {} not in (0, 1)",
                self.level
            )));
        }
        if !(self.m_llsw_coefficient > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cosine coefficient {} must be positive",
                self.m_llsw_coefficient
            )));
        }
        if self.criterion == Criterion::Fixed {
            return Err(Error::InvalidArgument(
                "criterion must be BIC or AIC".into(),
            ));
        }
        Ok(())
    }

    pub fn p_max_for(&self, t: usize) -> usize {
        self.p_max
            .unwrap_or_else(|| default_p_max(t))
            .min(default_cap(t))
    }

    /// Lag-order search used at sample size `t`.
    pub fn order_search(&self, t: usize) -> OrderSearch {
        OrderSearch {
            criterion: self.criterion,
            p_max: self.p_max_for(t),
            sample: self.ic_sample,
        }
    }

    /// DGP for one cell.
    pub fn spec(&self, rho: f64, t: usize, beta: f64) -> DgpSpec {
        let mut spec = DgpSpec::new(self.dgp, rho, t).with_beta(beta);
        if let Some(rx) = self.rho_x {
            spec = spec.with_rho_x(rx);
        }
        spec
    }

    pub(crate) fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

// Keeps the common selection sample larger than the biggest design.
fn default_cap(t: usize) -> usize {
    (t.saturating_sub(2)) / 3
}
