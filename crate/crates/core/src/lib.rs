// SPDX-License-Identifier: Apache-2.0

//! Optical pulses probing a cascade of optomechanical cavities.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod chain;
pub mod config;
pub mod constants;
pub mod error;
pub mod fields;
pub mod metrology;
pub mod output;
pub mod solver;

pub use error::{Error, Result};
