//! Mixed multiple orthogonal Laurent polynomials on the unit circle.
//!
//! A q×p matrix of functionals is turned into CMV-ordered moment matrices,
//! factorized without pivoting, and the resulting biorthogonal families
//! are checked against their recurrences, kernels and perturbations.

pub mod cli;
pub mod cmv;
pub mod error;
pub mod laurent;
pub mod measures;
pub mod kernels;
pub mod random;
pub mod report;
pub mod secondkind;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
