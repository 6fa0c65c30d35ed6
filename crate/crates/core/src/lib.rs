//! Numerical laboratory for densities of finite-rank operators on the circle.
//!
//! The crate is organised bottom-up:
//!
//! - [`fourier`]: coefficient representation, sampling, free Schrödinger flow.
//! - [`operators`]: density operators, Schatten norms, (renormalised) densities.
//! - [`strichartz`]: space-time densities of freely evolved operators and their norms.
//! - [`counting`]: the shift-count `r(alpha, beta)` on the support of the space-time coefficients.
//! - [`propagator`]: propagators for real time-dependent potentials.
//! - [`nlss`]: mean-field Schrödinger systems and their ill-posedness families.
//! - [`report`]: structured experiment records.

pub mod counting;
pub mod error;
pub mod fourier;
pub mod nlss;
pub mod operators;
pub mod propagator;
pub mod report;
pub mod strichartz;

pub use error::{Error, Result};
pub use fourier::{FourierField, SampledField, SpaceTimeBlock, TimeRule, TorusGrid};
pub use num_complex::Complex64;
pub use operators::{DensityOperator, SpectralData};
