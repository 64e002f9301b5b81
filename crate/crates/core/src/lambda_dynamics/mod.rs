//! The map `T_λ` on `[0, ∞)`: its branches, codings, cylinders and the
//! rotation picture that explains why it behaves like a circle rotation.

mod coding;
mod context;
mod geometry;
mod homography;

pub use coding::{code_orbit, cross_check_omega_infinity, omega_infinity, trace_orbit, OmegaCrossCheck, Orbit};
pub use context::{build_context, lambda_from_tau, lambda_k, Cylinder, LambdaContext};
pub use geometry::{circle_radius, radius_trace, GeometryRecord, GeometryState};
pub use homography::Homography;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DynamicsError {
    #[error("lambda = {0} is outside (0, 2)")]
    OutOfRange(f64),
    #[error("tau = {0} must exceed 2")]
    TauOutOfRange(f64),
    #[error("lambda = {0} is too close to 2: too many branches")]
    TooManyBranches(f64),
    #[error("x = {0} is negative")]
    NegativeInput(f64),
    #[error("x is not finite")]
    NonFinite,
    #[error("digit {digit} exceeds the alphabet 0..={i_lambda}")]
    DigitOutOfAlphabet { digit: usize, i_lambda: usize },
    #[error("rotation did not leave the half-plane")]
    GeometryDiverged,
}
