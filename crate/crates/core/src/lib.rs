//! Inertial first-order methods with Hessian-driven damping.
//!
//! - [`problem`]: smooth objectives, quadratics and composite least squares.
//! - [`prox`]: Moreau envelopes and proximal operators.
//! - [`algorithms`]: the discrete gradient and proximal schemes.
//! - [`special`]: Kummer and Bessel functions over complex arguments.
//! - [`dynamics`]: the damped ODEs, their energies and closed forms on quadratics.

// `!(x > 0.0)` is used on purpose so NaN fails validation; reference values
// keep every digit they were computed with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod algorithms;
pub mod dynamics;
pub mod error;
pub mod problem;
pub mod prox;
pub mod special;

pub use error::{Error, Result};
pub use problem::{Matrix, Vector};
