//! Simulated fixed-b critical values for the Bartlett kernel with `b = 1`.
//!
//! The limit of the t statistic is `W(1) / sqrt(2 ∫₀¹ B(r)² dr)` with `W`
//! standard Brownian motion and `B(r) = W(r) − r W(1)`. Draws are grouped
//! into fixed-size chunks, each with its own counter-based stream, so the
//! value depends only on `(level, grid_points, draws, seed)`.

use std::sync::Mutex;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::{ShockStream, StreamRole};
use crate::error::{Error, Result};

pub const DEFAULT_FIXED_B_GRID: usize = 1000;
pub const DEFAULT_FIXED_B_DRAWS: usize = 200_000;
pub const DEFAULT_FIXED_B_SEED: u64 = 20_020_917;

const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixedBParams {
    pub grid_points: usize,
    pub draws: usize,
    pub seed: u64,
}

impl Default for FixedBParams {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_FIXED_B_GRID,
            draws: DEFAULT_FIXED_B_DRAWS,
            seed: DEFAULT_FIXED_B_SEED,
        }
    }
}

fn draw_statistic<R: rand::Rng>(rng: &mut R, w: &mut [f64]) -> f64 {
    let n = w.len();
    let step = 1.0 / (n as f64).sqrt();
    let mut acc = 0.0;
    for wi in w.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        acc += z * step;
        *wi = acc;
    }
    let w1 = acc;
    let nf = n as f64;
    let mut integral = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let b = wi - (i + 1) as f64 / nf * w1;
        integral += b * b;
    }
    integral /= nf;
    w1.abs() / (2.0 * integral).sqrt()
}

/// Two-sided level-`level` quantile of `|W(1)| / sqrt(2 ∫ B²)`.
pub fn fixed_b_critical_value(
    level: f64,
    grid_points: usize,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level {level} not in (0, 1)"
        )));
    }
    if grid_points < 200 {
        return Err(Error::InvalidArgument(format!(
            "grid_points {grid_points} < 200"
        )));
    }
    if draws < 50_000 {
        return Err(Error::InvalidArgument(format!("draws {draws} < 50000")));
    }
    let chunks = draws.div_ceil(CHUNK);
    let mut stats: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let len = CHUNK.min(draws - c * CHUNK);
            let mut rng = ShockStream::new(seed, c as u64).rng(StreamRole::XShocks);
            let mut w = vec![0.0; grid_points];
            (0..len)
                .map(|_| draw_statistic(&mut rng, &mut w))
                .collect::<Vec<_>>()
        })
        .collect();
    let rank = (((1.0 - level) * draws as f64).ceil() as usize).clamp(1, draws) - 1;
    let (_, q, _) = stats.select_nth_unstable_by(rank, |a, b| a.total_cmp(b));
    Ok(*q)
}

static CACHE: Mutex<Vec<(u64, FixedBParams, f64)>> = Mutex::new(Vec::new());

/// Fixed-b critical value with explicit simulation settings, memoized per
/// process.
pub fn kv_critical_value_with(level: f64, params: FixedBParams) -> Result<f64> {
    let key = level.to_bits();
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(&(_, _, v)) = cache.iter().find(|(l, p, _)| *l == key && *p == params) {
        return Ok(v);
    }
    let v = fixed_b_critical_value(level, params.grid_points, params.draws, params.seed)?;
    cache.push((key, params, v));
    Ok(v)
}

/// Fixed-b critical value at the default simulation settings.
///
/// # Panics
/// If `level` is outside `(0, 1)`.
pub fn kv_critical_value(level: f64) -> f64 {
    kv_critical_value_with(level, FixedBParams::default()).expect("valid level")
}
