//! Zeros of random polynomials built from orthonormal bases on the real line
//! or the unit circle with i.i.d. complex Gaussian coefficients.
//!
//! The expected zero density `ρ_n` is computed in [`intensity`], integrated
//! in [`quadrature`] and checked against Monte Carlo counts from
//! [`sampling`]. [`experiments`] runs the reproducible studies and writes
//! their artifacts.
//!
//! ```
//! use num_complex::Complex64;
//! use ropz::basis::{Exclusion, JacobiRecurrence, Model};
//! use ropz::intensity::rho;
//!
//! let model = Model::Oprl(JacobiRecurrence::chebyshev());
//! let density = rho(&model, 20, Complex64::new(0.2, 0.5), &Exclusion::default()).unwrap();
//! assert!(density > 0.0);
//! ```

pub mod basis;
pub mod experiments;
pub mod error;
pub mod intensity;
pub mod kernels;
pub mod quadrature;
pub mod region;
pub mod sampling;

pub use error::{Error, Result};

/// Book chapters compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bases.md")]
    mod bases {}
    #[doc = include_str!("../../../book/src/intensity.md")]
    mod intensity {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
