use thiserror::Error;

use crate::phase_space::PhaseSpacePoint;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand is not finite ({value}) at {point:?}")]
    NonFiniteSample { point: PhaseSpacePoint, value: f64 },

    #[error("marginal has negative mass {negative:.3e} (total {total:.6}); box too small or Wigner function wrong")]
    MarginalNegativity { negative: f64, total: f64 },

    #[error("density grid mass {mass:.6} deviates from 1 by more than {tolerance:e}")]
    Normalization { mass: f64, tolerance: f64 },

    #[error("degenerate moment: {0}")]
    DegenerateMoment(String),

    #[error("invalid state descriptor `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("criterion `{criterion}` is not defined for {family} states")]
    Unsupported { criterion: String, family: String },

    #[error("invalid integration box: {0}")]
    InvalidBox(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
