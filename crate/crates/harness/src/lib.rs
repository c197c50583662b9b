//! Experiment runner around `hessdamp-core`: configs, seeded instances, rate
//! fitting, CSV/SVG output and the reproduction targets.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod instances;
pub mod output;
pub mod rate;
pub mod reproduce;
pub mod rng;
pub mod run;

pub use error::{HarnessError, Result};
