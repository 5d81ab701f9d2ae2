//! Capacity bounds for Gaussian interference networks.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the scalar for common use.

// `!(x > 0)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod network;
pub mod region;
pub mod scalar;
pub mod search;
pub mod two_user;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CovMatrix64 = gaussian::CovMatrix<f64>;
pub type CovMatrix32 = gaussian::CovMatrix<f32>;
pub type GaussianSystem64 = gaussian::GaussianSystem<f64>;
pub type GaussianSystem32 = gaussian::GaussianSystem<f32>;
pub type Network64 = channel::InterferenceNetwork<f64>;
pub type Network32 = channel::InterferenceNetwork<f32>;
pub type RateRegion64 = region::RateRegion<f64>;
pub type RateRegion32 = region::RateRegion<f32>;
