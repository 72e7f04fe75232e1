//! Data-generating processes with stationary initialization and
//! counter-based shock streams.
//!
//! Every draw is a pure function of `(seed, replication, role, index)`:
//! the ChaCha key is `(seed, replication)` and the ChaCha stream id is the
//! role. Changing ρ, β or T never changes which standard normals are used,
//! so experiments across the parameter grid share common random numbers.

use std::io::{self, Write};

use nalgebra::{DMatrix, Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::regression::{Sample, SampleMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DgpKind {
    /// AR(1) regressor, AR(1) disturbance.
    ArAr,
    /// AR(1) regressor, MA(1) disturbance.
    ArMa,
    /// Bivariate VAR(1) in `(x, u)`: contemporaneously orthogonal only.
    WeakExo,
}

impl DgpKind {
    pub fn label(self) -> &'static str {
        match self {
            DgpKind::ArAr => "ar",
            DgpKind::ArMa => "ma",
            DgpKind::WeakExo => "weakexo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ar" | "ar_ar" | "ar-ar" => Some(DgpKind::ArAr),
            "ma" | "ar_ma" | "ar-ma" => Some(DgpKind::ArMa),
            "weakexo" | "weak_exo" | "weak-exo" => Some(DgpKind::WeakExo),
            _ => None,
        }
    }
}

/// Default VAR(1) coefficient matrix of the weak-exogeneity design.
pub const WEAK_EXO_MATRIX: [[f64; 2]; 2] = [[0.5, 0.2], [0.3, 0.4]];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub kind: DgpKind,
    /// AR coefficient of `u` (ArAr), MA coefficient of `u` (ArMa). Also the
    /// AR coefficient of `x` unless `rho_x` overrides it. Unused by WeakExo.
    pub rho: f64,
    pub rho_x: Option<f64>,
    pub beta: f64,
    pub t: usize,
    /// Row-major VAR(1) matrix for `(x, u)`; WeakExo only.
    pub var_matrix: [[f64; 2]; 2],
}

impl DgpSpec {
    pub fn new(kind: DgpKind, rho: f64, t: usize) -> Self {
        Self {
            kind,
            rho,
            rho_x: None,
            beta: 1.0,
            t,
            var_matrix: WEAK_EXO_MATRIX,
        }
    }

    pub fn ar(rho: f64, t: usize) -> Self {
        Self::new(DgpKind::ArAr, rho, t)
    }

    pub fn ma(rho: f64, t: usize) -> Self {
        Self::new(DgpKind::ArMa, rho, t)
    }

    pub fn weak_exo(t: usize) -> Self {
        Self::new(DgpKind::WeakExo, 0.0, t)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_rho_x(mut self, rho_x: f64) -> Self {
        self.rho_x = Some(rho_x);
        self
    }

    /// AR coefficient of the regressor.
    pub fn x_coefficient(&self) -> f64 {
        self.rho_x.unwrap_or(self.rho)
    }

    pub fn var_coefficients(&self) -> Matrix2<f64> {
        let a = self.var_matrix;
        Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 2 {
            return Err(Error::InvalidArgument(format!("T = {} < 2", self.t)));
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidArgument("beta must be finite".into()));
        }
        match self.kind {
            DgpKind::ArAr | DgpKind::ArMa => {
                for (name, v) in [("rho", self.rho), ("rho_x", self.x_coefficient())] {
                    if !(v.abs() < 1.0) {
                        return Err(Error::ExplosiveSpec(format!("|{name}| = {} ≥ 1", v.abs())));
                    }
                }
            }
            DgpKind::WeakExo => {
                let radius = spectral_radius_2x2(&self.var_coefficients());
                if !(radius < 1.0) {
                    return Err(Error::ExplosiveSpec(format!(
                        "VAR spectral radius {radius} ≥ 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Which independent shock sequence a draw belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    XShocks = 0,
    UShocks = 1,
    Init = 2,
}

/// Identifies the random numbers of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShockStream {
    pub seed: u64,
    pub replication: u64,
}

impl ShockStream {
    pub fn new(seed: u64, replication: u64) -> Self {
        Self { seed, replication }
    }

    /// Generator positioned at draw 0 of `role`.
    pub fn rng(&self, role: StreamRole) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.replication.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(role as u64);
        rng
    }

    /// The first `n` standard normal draws of `role`.
    pub fn normals(&self, role: StreamRole, n: usize) -> Vec<f64> {
        let mut rng = self.rng(role);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}

/// Presample state drawn from the stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `x_0`, `u_0` for the AR(1)/AR(1) design.
    Ar { x0: f64, u0: f64 },
    /// `x_0` and the presample MA innovation `ε_0`.
    Ma { x0: f64, eps0: f64 },
    /// `(x_0, u_0)` jointly from the VAR(1) stationary law.
    Var { x0: f64, u0: f64 },
}

pub fn stationary_init(spec: &DgpSpec, stream: &ShockStream) -> Result<InitialState> {
    spec.validate()?;
    let z = stream.normals(StreamRole::Init, 2);
    Ok(match spec.kind {
        DgpKind::ArAr => InitialState::Ar {
            x0: z[0] * ar1_stationary_sd(spec.x_coefficient()),
            u0: z[1] * ar1_stationary_sd(spec.rho),
        },
        DgpKind::ArMa => InitialState::Ma {
            x0: z[0] * ar1_stationary_sd(spec.x_coefficient()),
            eps0: z[1],
        },
        DgpKind::WeakExo => {
            let chol = var_stationary_covariance(&spec.var_coefficients())?
                .cholesky()
                .ok_or_else(|| Error::ExplosiveSpec("stationary covariance not PD".into()))?;
            let v = chol.l() * Vector2::new(z[0], z[1]);
            InitialState::Var { x0: v[0], u0: v[1] }
        }
    })
}

/// Standard deviation of a unit-innovation stationary AR(1).
pub fn ar1_stationary_sd(rho: f64) -> f64 {
    1.0 / (1.0 - rho * rho).sqrt()
}

/// Simulates `spec.t + horizon_extra` observations; `y = β x + u`.
pub fn simulate(spec: &DgpSpec, stream: &ShockStream, horizon_extra: usize) -> Result<Sample> {
    let init = stationary_init(spec, stream)?;
    let n = spec.t + horizon_extra;
    let ex = stream.normals(StreamRole::XShocks, n);
    let eu = stream.normals(StreamRole::UShocks, n);
    let mut x = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);

    match init {
        InitialState::Ar { x0, u0 } => {
            let (rx, ru) = (spec.x_coefficient(), spec.rho);
            let (mut xp, mut up) = (x0, u0);
            for t in 0..n {
                xp = rx * xp + ex[t];
                up = ru * up + eu[t];
                x.push(xp);
                u.push(up);
            }
        }
        InitialState::Ma { x0, eps0 } => {
            let rx = spec.x_coefficient();
            let mut xp = x0;
            let mut ep = eps0;
            for t in 0..n {
                xp = rx * xp + ex[t];
                x.push(xp);
                u.push(eu[t] + spec.rho * ep);
                ep = eu[t];
            }
        }
        InitialState::Var { x0, u0 } => {
            let a = spec.var_coefficients();
            let (mut xp, mut up) = (x0, u0);
            for t in 0..n {
                let xn = a[(0, 0)] * xp + a[(0, 1)] * up + ex[t];
                let un = a[(1, 0)] * xp + a[(1, 1)] * up + eu[t];
                xp = xn;
                up = un;
                x.push(xp);
                u.push(up);
            }
        }
    }

    let y = x.iter().zip(&u).map(|(x, u)| spec.beta * x + u).collect();
    Ok(Sample {
        y,
        x: DMatrix::from_vec(n, 1, x),
        u: Some(u),
        meta: Some(SampleMeta {
            spec: spec.clone(),
            seed: stream.seed,
            replication: stream.replication,
        }),
    })
}

pub fn spectral_radius_2x2(a: &Matrix2<f64>) -> f64 {
    let tr = a[(0, 0)] + a[(1, 1)];
    let det = a.determinant();
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (tr / 2.0 + s).abs().max((tr / 2.0 - s).abs())
    } else {
        det.sqrt()
    }
}

/// Solves `Σ = A Σ A' + Q` for square `A` with spectral radius < 1 by
/// vectorization: `(I − A⊗A) vec Σ = vec Q`.
pub fn discrete_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || q.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "Lyapunov operands must be square and conformable".into(),
        ));
    }
    let lhs = DMatrix::identity(n * n, n * n) - a.kronecker(a);
    let rhs = nalgebra::DVector::from_column_slice(q.as_slice());
    let vec = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::ExplosiveSpec("Lyapunov system is singular".into()))?;
    let sigma = DMatrix::from_column_slice(n, n, vec.as_slice());
    // Symmetrize away rounding.
    Ok((&sigma + sigma.transpose()) * 0.5)
}

/// Stationary covariance of `z_t = A z_{t-1} + e_t`, `e_t ~ N(0, I)`.
pub fn var_stationary_covariance(a: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    if !(spectral_radius_2x2(a) < 1.0) {
        return Err(Error::ExplosiveSpec("VAR is not stationary".into()));
    }
    let a_dyn = DMatrix::from_column_slice(2, 2, a.as_slice());
    let s = discrete_lyapunov(&a_dyn, &DMatrix::identity(2, 2))?;
    Ok(Matrix2::from_column_slice(s.as_slice()))
}

/// Writes `t,y,x,u` rows (or `x1..xk` for several regressors).
pub fn write_sample_csv<W: Write>(sample: &Sample, mut out: W) -> io::Result<()> {
    let k = sample.k();
    let mut header = vec!["t".to_string(), "y".to_string()];
    if k == 1 {
        header.push("x".into());
    } else {
        header.extend((1..=k).map(|i| format!("x{i}")));
    }
    header.push("u".into());
    writeln!(out, "{}", header.join(","))?;
    for t in 0..sample.len() {
        let mut row = vec![(t + 1).to_string(), fmt_f64(sample.y[t])];
        row.extend((0..k).map(|j| fmt_f64(sample.x[(t, j)])));
        row.push(sample.u.as_ref().map(|u| fmt_f64(u[t])).unwrap_or_default());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
