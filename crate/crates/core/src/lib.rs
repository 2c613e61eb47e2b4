//! Numerical toolkit for space-time symmetric detection statistics of a
//! non-relativistic particle in one dimension.
//!
//! The crate is `no_std` and only needs `alloc`. All operations are pure
//! functions over immutable grids and fields; IO, configuration and CSV
//! output live in the `stqm` companion crate.
//!
//! Module map:
//!
//! - [`grid`], [`field`], [`spectrum`]: uniform grids, sampled fields and
//!   momentum spectra `C±(P)`.
//! - [`spectral`]: FFT-based half-derivative and the joint
//!   `(x, t) -> (p, ε)` transform.
//! - [`arrival`]: free-particle mirror solution, arrival-time density and
//!   its oracles (adaptive quadrature, Schrödinger current).
//! - [`stationary`]: Poisson detection model and Lorentzian energy profiles.
//! - [`bayes`]: joint densities, marginals, conditionals and the seeded
//!   detection-event sampler.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arrival;
pub mod bayes;
mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod quad;
pub mod spectral;
pub mod spectrum;
pub mod stationary;

pub use error::{Edge, Error, Result};
pub use field::{ComplexField, Field2, RealField};
pub use grid::{make_grid, Grid1D, PhysicalConstants};
pub use num_complex::Complex64;
pub use spectrum::{gaussian_spectrum, normalize_spectrum, Branch, MomentumSpectrum};
