use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bad shape: {rows}x{cols} transform needs rows >= cols >= 1")]
    BadShape { rows: usize, cols: usize },

    #[error("transform is rank deficient (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },

    #[error("bad lattice: {0}")]
    BadLattice(String),

    #[error("gabor system is not a frame (lower bound {lower:e}, upper bound {upper:e})")]
    NotAFrame { lower: f64, upper: f64 },

    #[error("magnitude entry {index} is invalid ({value})")]
    InvalidMagnitude { index: usize, value: f64 },

    #[error("target magnitudes are identically zero")]
    ZeroTarget,

    #[error("condition on (beta, gamma) violated: beta = {beta}, gamma = {gamma}")]
    Cond1Violated { beta: f64, gamma: f64 },

    #[error("parameters ({alpha}, {beta}, {gamma}) carry no convergence guarantee")]
    GateFailed { alpha: f64, beta: f64, gamma: f64 },

    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    #[error("iterate became non-finite at iteration {iter}")]
    NonFiniteIterate { iter: usize },

    #[error("unsupported input format: {0}")]
    UnsupportedFormat(String),

    #[error("input contains no samples")]
    EmptyFile,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Wav(#[from] hound::Error),
}
