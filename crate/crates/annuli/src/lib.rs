//! Numerical laboratory for averaging operators on annuli, balls and
//! spheres of R^d.
//!
//! The crate provides:
//!
//! - [`geometry`]: annuli in the ℓ² and ℓ∞ norms, volumes, membership,
//!   and thickness functions r ↦ e(r);
//! - [`specfun`]: Bessel J of integer and half-integer order and the
//!   Fourier transform of the uniform sphere probability;
//! - [`fields`]: the registry of scalar test functions, centered on the
//!   critical-integrability counterexample −1/(‖x‖^{d−1} ln ‖x‖);
//! - [`sampling`]: uniform sampling and averaging on annuli and spheres
//!   (seeded, chunked Monte Carlo and deterministic product rules);
//! - [`maximal`]: maximal operators over radius grids, superlevel-set
//!   measures, weak-type ratios, and the thin-versus-proportional
//!   dichotomy experiment;
//! - [`fourier`]: Fourier kernels of uniform annulus measures in every
//!   dimension, including the two-interval kernel in d = 1;
//! - [`ergodic`]: torus translation flows, annulus ergodic averages and
//!   their exact spectral forms.
//!
//! All Monte Carlo is seeded and chunked with order-fixed reductions, so
//! identical inputs produce bit-identical results at any parallelism.

pub mod error;
pub mod fields;
pub mod fourier;
pub mod geometry;
pub mod maximal;
pub mod quad;
pub mod sampling;
pub mod specfun;

pub mod ergodic;

pub use error::{Error, Result};

/// Hard cap on the ambient dimension: quadrature cost and Bessel orders
/// stay desk-scale.
pub const MAX_DIM: usize = 10;

/// Validate 1 ≤ d ≤ [`MAX_DIM`].
pub fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionOutOfRange { got: d });
    }
    Ok(())
}
