//! Simulation and statistics for a two-pump cascaded (SFG then DFG) quantum
//! frequency shifter.
//!
//! A telecom signal photon is up-converted with pump 1 and down-converted
//! with pump 2 inside one quasi-phase-matched crystal, so it leaves shifted by
//! the pump frequency difference. The crate covers:
//!
//! - [`dispersion`]: Sellmeier models, phase mismatch, QPM periods and the
//!   response of uniform and linearly chirped gratings.
//! - [`cascade`]: the Heisenberg rotation, stage `Pmax`, cascaded efficiency
//!   and the frequency ladder.
//! - [`pairsource`]: SPDC pair and singles rates and the source CAR.
//! - [`carmodel`]: CAR of shifted-vs-reference coincidences as a function of
//!   SPDC pump, cascade pump and crystal temperature.
//! - [`montecarlo`]: seeded event streams, detectors with dead time and a
//!   two-pointer coincidence histogram.
//! - [`filters`]: ITU 100 GHz grid and super-Gaussian channel filters.
//! - [`scenario`]: config documents, named experiments and sweeps writing CSV.
//!
//! Runnable walkthroughs live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carmodel;
pub mod cascade;
pub mod dispersion;
pub mod error;
pub mod filters;
pub mod montecarlo;
pub mod pairsource;
pub mod scenario;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Optical frequency in THz of a vacuum wavelength in nm.
pub fn wavelength_to_thz(wavelength_nm: f64) -> f64 {
    SPEED_OF_LIGHT * 1e-3 / wavelength_nm
}

/// Vacuum wavelength in nm of an optical frequency in THz.
pub fn thz_to_wavelength(frequency_thz: f64) -> f64 {
    SPEED_OF_LIGHT * 1e-3 / frequency_thz
}
