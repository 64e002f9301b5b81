//! The bridge between `T_λ` and the β-shift: `β(λ)` and its inverse, the
//! conjugacy `φ_λ`, entropy, shift-maximal words and Minkowski's `?`.

mod lsm;
mod minkowski;
mod solver;

pub use lsm::{is_lsm, lambda_interval_for_prefix, succ_lsm, LambdaInterval, LsmWord};
pub use minkowski::minkowski_q;
pub use solver::{
    beta_of_lambda, curve_point, entropy, lambda_of_beta, phi, BetaSolution, CurvePoint, PhiValue,
};

use thiserror::Error;

use crate::beta_shift::BetaError;
use crate::lambda_dynamics::DynamicsError;
use crate::numerics::NumericsError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CorrespondenceError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Beta(#[from] BetaError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("a prefix of {0} digits still cannot resolve the tolerance")]
    PrefixTooShort(usize),
    #[error("beta = {0} is outside (1, ∞)")]
    BetaOutOfRange(f64),
    #[error("word {0} is not lexicographically shift maximal")]
    NotLsm(String),
    #[error("no lambda in (0, 2) realizes the prefix {0}")]
    Empty(String),
}
