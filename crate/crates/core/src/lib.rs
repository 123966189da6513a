//! Explicit constants, discrete Laplacians on surfaces and analytic model
//! spectra for lower bounds on the first eigenvalue of the rough Laplacian
//! acting on 1-forms.

// `!(x > 0.0)` style comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod eigen;
pub mod error;
pub mod mesh;
pub mod operators;
mod par;
pub mod quad;
pub mod roots;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
