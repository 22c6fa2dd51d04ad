//! Command-line driver: configuration files, parameter sweeps, figure presets
//! and the validation gates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod figures;
pub mod plot;
pub mod sweep;
pub mod validate;
