//! Volumes of unit balls of the finite-dimensional Lorentz sequence spaces
//! `l^n_{p,q}`, with the asymptotic and entropy-number experiments built on
//! them.
//!
//! The exact engines run in arbitrary precision ([`PrecisionContext`]) and
//! report `f64` values with an error bound; [`mc`] provides an independent
//! Monte Carlo oracle for any `(p, q)`.

pub mod asymptotics;
pub mod entropy;
pub mod error;
pub mod mc;
pub mod norm;
pub mod precision;
pub mod volume;

pub use error::{Error, Result};
pub use mc::{mc_positive_orthant, mc_volume, McConfig, McEstimate};
pub use norm::{
    embedding_constant, in_ball, kappa, lorentz_norm, rearrange, BallTester, ExtendedReal, Params,
    RearrangedVector, Vector,
};
pub use precision::{HighPrecision, PrecisionContext, DEFAULT_MANTISSA_BITS};
pub use volume::{vol_ball, vol_lebesgue, vol_q1, Method, VolumeResult};
