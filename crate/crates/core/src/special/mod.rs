//! Special functions over complex arguments.

mod bessel;
pub(crate) mod dd;
mod gamma;
mod kummer;

pub use bessel::{
    bessel_j, bessel_j_complex, bessel_j_derivative, bessel_j_derivative_complex, bessel_y, bessel_y_complex,
    bessel_y_derivative, bessel_y_derivative_complex,
};
pub use gamma::{gamma, ln_gamma, rgamma};
pub use kummer::{kummer_m, kummer_m_scaled, kummer_u, kummer_u_perturbed};

pub type ComplexScalar = num_complex::Complex64;
