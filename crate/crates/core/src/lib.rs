//! Barrier functions, structure conditions and discrete checks for
//! degenerate elliptic equations with non-Lipschitz gradient terms.
//!
//! The crate is `no_std` (it needs `alloc`). All transcendental functions go
//! through [`libm`] so results are identical with and without `std`.
//!
//! Module map:
//!
//! * [`nonlinearity`]: growth functions `phi`, the Osgood / Keller–Osserman
//!   integral tests and the large-gradient condition on `f' = -phi(f)`.
//! * [`spectral`]: symmetric matrices, Jacobi eigenvalues, Pucci operators.
//! * [`barriers`]: radial strict sub/supersolutions on annuli.
//! * [`counterexamples`]: the one-dimensional functions showing both growth
//!   conditions are necessary.
//! * [`geometry`]: signed-distance domains in the plane, grids, bands.
//! * [`solver`]: finite differences for `div(|Du|^{p(x)-2} Du) = a|u|^{q(x)-2}u + f`.
//! * [`verification`]: empirical maximum principle and boundary checks.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod barriers;
pub mod counterexamples;
mod error;
pub mod geometry;
pub mod nonlinearity;
pub mod ode;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod verification;

pub use error::{Error, Result};
