//! Refractive-index models, phase mismatch, quasi-phase matching and the
//! integrated response of uniform and chirped gratings.
//!
//! Wavelengths are vacuum wavelengths in nm, temperatures in °C, periods in
//! μm and wavevector mismatches in rad/m.

mod chirp;
mod crystal;
mod model;
mod process;
mod qpm;

pub use chirp::{
    chirped_response, grating_amplitude, relative_efficiency, sinc, ConversionSpectrum, ProcessFamily,
    DEFAULT_SEGMENTS, MIN_SEGMENTS,
};
pub use crystal::{CrystalSpec, PolingProfile, PERIOD_BAND_UM};
pub use model::{DispersionLibrary, DispersionModel, SellmeierFormula};
pub use process::{ProcessKind, ThreeWaveProcess};
pub use qpm::{
    calibrate_trim_ppm, calibrated, grating_vector, intrinsic_mismatch, phase_mismatch, qpm_period,
    qpm_temperature, qpm_wavelength,
};
