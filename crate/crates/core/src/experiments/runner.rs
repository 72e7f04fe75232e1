//! Per-replication work shared by every experiment family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::dgp::{simulate, DgpKind, ShockStream};
use crate::dynreg::{select_order_by, Criterion, OrderSearch};
use crate::error::{Error, Result};
use crate::hac::{
    bandwidth_with, bartlett_lrv, cosine_lrv_with_basis, critical_value, hac_statistic,
    kv_critical_value_with, BandwidthRule, CosineBasis, Reference, TestMethod,
};
use crate::regression::{ols_fit, ols_t_stat, Sample};

/// Identifies one Monte Carlo cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub dgp: DgpKind,
    pub criterion: Criterion,
    pub rho: f64,
    pub t: usize,
    pub beta_true: f64,
}

/// What one replication contributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub beta_ols: f64,
    pub beta_dyn: f64,
    pub lag: usize,
    /// Rejection of `H0: β = null` per method, aligned with the cell's
    /// method list.
    pub rejects: Vec<bool>,
}

/// All replications of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub key: CellKey,
    pub methods: Vec<TestMethod>,
    /// Successful replications in replication order.
    pub records: Vec<RepRecord>,
    pub failed_reps: usize,
    pub first_error: Option<Error>,
}

/// Per-cell constants so replications do no repeated setup.
struct CellPlan {
    methods: Vec<(TestMethod, MethodPlan)>,
    null_value: f64,
    search: OrderSearch,
}

enum MethodPlan {
    Ols {
        cv: f64,
    },
    Bartlett {
        h: usize,
        cv: f64,
    },
    Cosine {
        basis: CosineBasis,
        cv: f64,
    },
    DynReg {
        cv: f64,
        student_t: bool,
        level: f64,
    },
}

impl CellPlan {
    fn new(config: &ExperimentConfig, t: usize) -> Result<Self> {
        let normal = critical_value(Reference::Normal, config.level)?;
        let mut methods = Vec::with_capacity(config.methods.len());
        for &m in &config.methods {
            let plan = match m {
                TestMethod::Ols => MethodPlan::Ols { cv: normal },
                TestMethod::Hac(rule) => {
                    let bw = bandwidth_with(rule, t, config.m_llsw_coefficient);
                    match rule {
                        BandwidthRule::MLlsw => {
                            let basis = CosineBasis::new(t, bw)?;
                            let cv = critical_value(Reference::StudentT(bw as f64), config.level)?;
                            MethodPlan::Cosine { basis, cv }
                        }
                        BandwidthRule::NwKv => MethodPlan::Bartlett {
                            h: bw,
                            cv: kv_critical_value_with(config.level, config.fixed_b)?,
                        },
                        _ => MethodPlan::Bartlett { h: bw, cv: normal },
                    }
                }
                TestMethod::DynReg => MethodPlan::DynReg {
                    cv: normal,
                    student_t: config.dynreg_student_t,
                    level: config.level,
                },
                TestMethod::HacCustom => {
                    return Err(Error::InvalidArgument(
                        "experiments need a bandwidth rule for every HAC method".into(),
                    ))
                }
            };
            methods.push((m, plan));
        }
        Ok(Self {
            methods,
            null_value: config.null_value,
            search: config.order_search(t),
        })
    }

    fn replicate(&self, sample: &Sample) -> Result<RepRecord> {
        let ols = ols_fit(&sample.x, &sample.y)?;
        let dyn_fit = select_order_by(sample, &self.search)?;
        let mut rejects = Vec::with_capacity(self.methods.len());
        for (_, plan) in &self.methods {
            let (stat, cv) = match plan {
                MethodPlan::Ols { cv } => (ols_t_stat(&ols, 0, self.null_value)?, *cv),
                MethodPlan::Bartlett { h, cv } => {
                    let lrv = bartlett_lrv(&ols, &sample.x, *h)?;
                    (hac_statistic(&ols, &lrv, 0, self.null_value)?, *cv)
                }
                MethodPlan::Cosine { basis, cv } => {
                    let lrv = cosine_lrv_with_basis(&ols, &sample.x, basis)?;
                    (hac_statistic(&ols, &lrv, 0, self.null_value)?, *cv)
                }
                MethodPlan::DynReg {
                    cv,
                    student_t,
                    level,
                } => {
                    let stat = ols_t_stat(&dyn_fit.fit, dyn_fit.beta_index(0), self.null_value)?;
                    let cv = if *student_t {
                        let dof = (dyn_fit.n_effective - dyn_fit.n_params()) as f64;
                        critical_value(Reference::StudentT(dof), *level)?
                    } else {
                        *cv
                    };
                    (stat, cv)
                }
            };
            rejects.push(stat.abs() > cv);
        }
        Ok(RepRecord {
            beta_ols: ols.beta_hat[0],
            beta_dyn: dyn_fit.beta()[0],
            lag: dyn_fit.p,
            rejects,
        })
    }
}

/// Runs every replication of one cell on the current rayon pool.
///
/// Replication `r` always draws from stream `(config.seed, r)`, so cells
/// that differ only in `rho`, `T` or `beta_true` share their shocks.
pub fn run_cell(
    config: &ExperimentConfig,
    rho: f64,
    t: usize,
    beta_true: f64,
) -> Result<CellOutcome> {
    let spec = config.spec(rho, t, beta_true);
    spec.validate()?;
    let plan = CellPlan::new(config, t)?;
    let results: Vec<Result<RepRecord>> = (0..config.reps as u64)
        .into_par_iter()
        .map(|r| {
            let sample = simulate(&spec, &ShockStream::new(config.seed, r), 0)?;
            plan.replicate(&sample)
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut failed_reps = 0;
    let mut first_error = None;
    for res in results {
        match res {
            Ok(rec) => records.push(rec),
            Err(e) => {
                failed_reps += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    Ok(CellOutcome {
        key: CellKey {
            dgp: config.dgp,
            criterion: config.criterion,
            rho,
            t,
            beta_true,
        },
        methods: plan.methods.iter().map(|(m, _)| *m).collect(),
        records,
        failed_reps,
        first_error,
    })
}
