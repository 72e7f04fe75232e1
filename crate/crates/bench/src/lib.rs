//! Shared fixtures for the benchmarks.

use dynreg_core::{simulate, DgpSpec, Sample, ShockStream};

pub const SEED: u64 = 7;

/// One AR(1)/AR(1) replication of length `t`.
pub fn ar_sample(rho: f64, t: usize) -> Sample {
    simulate(&DgpSpec::ar(rho, t), &ShockStream::new(SEED, 0), 0).expect("valid spec")
}
