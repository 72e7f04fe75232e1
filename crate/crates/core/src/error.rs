use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("design matrix is rank deficient (condition ratio {ratio:.3e})")]
    RankDeficient { ratio: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("moment matrix is singular")]
    SingularQ,

    #[error("bandwidth {bandwidth} outside the admissible range [{min}, {max}]")]
    BandwidthOutOfRange {
        bandwidth: usize,
        min: usize,
        max: usize,
    },

    #[error("long-run variance gives a negative variance ({0:e}) for the tested coefficient")]
    NonPsdLrv(f64),

    #[error("insufficient data: {rows} usable rows for {params} parameters")]
    InsufficientData { rows: usize, params: usize },

    #[error("sum of squared errors is zero (exact fit)")]
    ZeroSse,

    #[error("history too short: need {needed} observations, got {got}")]
    InsufficientHistory { needed: usize, got: usize },

    #[error("non-stationary data-generating process: {0}")]
    ExplosiveSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
