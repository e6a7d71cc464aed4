use thiserror::Error;

use crate::simplex::LpError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {name} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("moment {name} = {value} is outside [-1, 1]")]
    MomentOutOfRange { name: &'static str, value: f64 },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("noise parameter lambda = {0} must lie in [0, 1)")]
    NoiseOutOfRange(f64),

    #[error("basis angle alpha = {0} must lie in [0, pi/4]")]
    AngleOutOfRange(f64),

    #[error("CHSH settings must differ on each side (a1 != a2, b1 != b2)")]
    DegenerateChsh,

    #[error("grid resolution must be at least 2, got {0}")]
    InvalidGrid(usize),

    #[error("unsupported request: {0}")]
    Unsupported(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("box file schema: {0}")]
    Schema(String),

    #[error("region file: {0}")]
    RegionFormat(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("linear program: {0}")]
    Lp(#[from] LpError),
}
