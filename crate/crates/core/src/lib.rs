//! Higher-order mean curvatures and Newton transformations of screen almost
//! conformal half-lightlike submanifolds, with exact and floating-point
//! arithmetic.

pub mod fixtures;
pub mod framecalc;
pub mod identities;
pub mod matrix;
pub mod newton;
pub mod sacrel;
pub mod scalar;
pub mod symfun;

pub use matrix::{Matrix, MatrixError};
pub use num_traits::{One, Zero};
pub use scalar::{ArithmeticMode, Rational, Scalar};
pub use symfun::Spectrum;
