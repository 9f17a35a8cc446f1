//! Error taxonomy shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "grid of {points} points cannot resolve bandwidth {bandwidth} (need at least {needed})"
    )]
    Resolution {
        points: usize,
        bandwidth: usize,
        needed: usize,
    },

    #[error("coefficients violate conjugate symmetry at k = {k} (deviation {deviation:.3e})")]
    ConjugateSymmetry { k: i64, deviation: f64 },

    #[error("symbol '{name}' is degenerate: a({k}) = 0")]
    Degenerate { name: String, k: i64 },

    #[error("symbol '{name}' admits no order-3 expansion: {reason}")]
    ExpansionFailure { name: String, reason: String },

    #[error("sup-norm constant diverges for symbol of order {order} (need order < -1/2)")]
    DivergentSum { order: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("trajectory too sparse: {0}")]
    Cadence(String),

    #[error("solution overflowed (NaN/Inf) at t = {t}")]
    Overflow { t: f64 },

    #[error("flow map lost invertibility: phi_x = {phi_x:.3e} <= 0 at grid index {index}")]
    DiffeomorphismLoss { index: usize, phi_x: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
