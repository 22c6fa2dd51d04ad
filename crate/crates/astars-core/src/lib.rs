//! Performance analysis of active simultaneously transmitting and reflecting
//! surface (STAR) assisted NOMA downlinks.
//!
//! * [`numerics`]: special functions and quadrature rules.
//! * [`model`]: network configuration and cascade-channel statistics.
//! * [`analytic`]: closed-form outage probabilities, ergodic rates, throughput.
//! * [`asymptotic`]: high-SNR expressions and slope extraction.
//! * [`montecarlo`]: exact signal-model simulation and baselines.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod asymptotic;
pub mod error;
pub mod exec;
pub mod model;
pub mod montecarlo;
pub mod numerics;

pub use error::{Error, Result};
