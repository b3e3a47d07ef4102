use thiserror::Error;

use crate::spectral::Side;

/// Errors raised by the numerical operators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("divergent spectral integral on side {side}: {detail}")]
    DivergentSpectralIntegral { side: Side, detail: String },

    #[error("divergent tail integral on side {side} at r = {r}")]
    DivergentTail { side: Side, r: f64 },

    #[error("characteristic function vanishes at t = {t}: not infinitely divisible along this path")]
    NotInfinitelyDivisible { t: f64 },

    #[error("grid too coarse near t = {t}: argument increment {jump:.3} between neighbours")]
    GridTooCoarse { t: f64, jump: f64 },

    #[error(
        "log-moment violation suspected at t = {t} (stage {stage}): tail estimate {tail_estimate:e} at s = {horizon}"
    )]
    LogMomentViolation {
        t: f64,
        stage: usize,
        horizon: f64,
        tail_estimate: f64,
    },

    #[error("numerical differentiation failed at {at}: residual estimate {residual:e}")]
    Differentiation { at: f64, residual: f64 },

    #[error("input is not of class L on side {side}: r*m(r) increases near r = {r} by {magnitude:e}")]
    NotClassL { side: Side, r: f64, magnitude: f64 },

    #[error("input is not of class U on side {side}: density increases near r = {r} by {magnitude:e}")]
    NotClassU { side: Side, r: f64, magnitude: f64 },

    #[error("infinite logarithmic moment on side {side}")]
    InfiniteLogMoment { side: Side },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
