//! Rodrigues descendants `d^m/dz^m P(z)^n`: exact construction, their linear ODEs,
//! the algebraic curves governing the asymptotic root distribution, and the
//! saddle-point machinery that predicts logarithmic potentials and Cauchy transforms.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boutroux;
pub mod curves;
pub mod error;
pub mod exactpoly;
pub mod numeric;
pub mod odes;
pub mod parse;
pub mod quadratic;
pub mod rootfind;
pub mod saddleflow;
pub mod trace;

pub use error::{CurveError, OdeError, PolyError, QuadraticError, ResidueError, RootError, SaddleError};
pub use exactpoly::{ExactPoly, ExactRatFun, Rational};
pub use num_complex::Complex64;
