//! Dense complex matrices and the handful of matrix functions the rest of
//! the crate needs: operator norm, Hermitian eigendecomposition and square
//! root, exponential, logarithm near the identity, polar factors and
//! inversion.

mod eig;
mod functions;
mod matrix;

pub use eig::{herm_eig, herm_eig_with, HermEig};
pub use functions::{
    herm_sqrt, herm_sqrt_with, inverse, is_positive_definite, is_positive_definite_with,
    mat_exp, mat_log_near_identity, op_norm, polar, polar_with, Polar,
};
pub use matrix::{ComplexMatrix, Tolerance};
pub use num_complex::Complex64;

/// Shorthand for a complex scalar.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests;
