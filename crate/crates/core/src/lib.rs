//! Modelling toolkit for dual-pump spontaneous four-wave-mixing photon-pair
//! sources in birefringent fiber.
//!
//! The crate is organised bottom-up:
//!
//! - [`dispersion`]: Sellmeier index, wavenumbers, group delays and the
//!   phasematched signal/idler solver.
//! - [`faddeeva`]: complex error function built on the Faddeeva function.
//! - [`spectral`]: process parameters, joint spectral amplitudes on grids and
//!   the closed-form pair-generation probability.
//! - [`analysis`]: normalization, Schmidt purity, fidelity, overlaps and
//!   marginals of discretized amplitudes.
//! - [`counts`]: detection-count forward model, correlation estimators and
//!   seeded synthetic experiments.
//! - [`fit`]: shared-parameter Levenberg-Marquardt fit of the three count
//!   curves with covariance-based uncertainties.
//! - [`purity`]: raw/noise/detection purities, count fractions and the
//!   noise-corrected purity bounds.
//!
//! Internal units: time in ps, length in mm, angular frequency in rad/ps and
//! wavelength in nm at the API boundary.

pub mod analysis;
pub mod counts;
pub mod dispersion;
mod error;
mod estimate;
pub mod faddeeva;
pub mod fit;
pub mod jsa_io;
pub mod purity;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use estimate::Estimate;
