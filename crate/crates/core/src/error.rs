use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("a design needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("design point {index} is not finite")]
    NonFinitePoint { index: usize },

    #[error("design points {index} and {next} coincide", next = .index + 1)]
    RepeatedPoint { index: usize },

    #[error("gap {index} is numerically zero (rate * gap = {scaled_gap:e} is below the floor {floor:e})")]
    NearSingular {
        index: usize,
        scaled_gap: f64,
        floor: f64,
    },

    #[error("grid has {points} points, above the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },

    #[error("matrix is not positive definite (leading minor {minor} failed)")]
    NotPositiveDefinite { minor: usize },

    #[error("information matrix is singular (determinant {det:e})")]
    SingularFim { det: f64 },

    #[error("exponential overflow at beta = {beta}")]
    Overflow { beta: f64 },

    #[error("no sign change in bracket [{lo}, {hi}] while solving for {what}")]
    BracketFailure { what: &'static str, lo: f64, hi: f64 },

    #[error("the K-optimal design collapses at these covariance parameters")]
    CollapsedDesign,

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
