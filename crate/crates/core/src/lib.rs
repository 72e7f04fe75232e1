//! Dynamic regression versus HAC inference for a single regression
//! coefficient under serially correlated errors.

// `!(a < b)` comparisons deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dgp;
pub mod dynreg;
pub mod error;
pub mod experiments;
pub mod forecasting;
pub mod format;
pub mod hac;
mod linalg;
pub mod regression;

pub use dgp::{simulate, DgpKind, DgpSpec, ShockStream, StreamRole};
pub use error::{Error, Result};
pub use format::{fmt_f64, fmt_opt};
pub use hac::{
    bandwidth, bartlett_lrv, cosine_lrv, hac_t_test, ols_t_test, BandwidthRule, LrvEstimate,
    TestMethod, TestResult,
};
pub use linalg::{mean, pairwise_sum};
pub use regression::{ols_fit, RegressionFit, Sample, SampleMeta};

pub use nalgebra;
pub use rayon;
