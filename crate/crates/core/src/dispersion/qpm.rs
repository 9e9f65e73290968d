//! Phase mismatch and quasi-phase-matching solutions for a single grating
//! period.

use std::f64::consts::PI;

use super::{CrystalSpec, ProcessKind, ThreeWaveProcess};
use crate::error::{Error, Result};

/// `k_high − k_low1 − k_low2` in rad/m at the crystal temperature, before any
/// grating contribution.
pub fn intrinsic_mismatch(process: &ThreeWaveProcess, crystal: &CrystalSpec) -> Result<f64> {
    let (high, low1, low2) = process.by_frequency();
    let t = crystal.temperature_c;
    let model = &crystal.dispersion;
    Ok(model.wavenumber(high, t)? - model.wavenumber(low1, t)? - model.wavenumber(low2, t)?)
}

/// Residual mismatch `Δk = k_high − k_low1 − k_low2 − 2π/Λ` (rad/m) for a
/// physical local period `period_um`.
///
/// For SFG the high wave is the output; for DFG it is input `a`, so the same
/// grating phase-matches an SFG and the DFG that undoes it.
pub fn phase_mismatch(process: &ThreeWaveProcess, crystal: &CrystalSpec, period_um: f64) -> Result<f64> {
    Ok(intrinsic_mismatch(process, crystal)? - grating_vector(period_um))
}

/// Grating wavevector `2π/Λ` in rad/m.
pub fn grating_vector(period_um: f64) -> f64 {
    2.0 * PI / (period_um * 1e-6)
}

/// Physical period (μm) that zeroes the mismatch: `Λ = 2π/(k_high − k_low1 − k_low2)`.
pub fn qpm_period(process: &ThreeWaveProcess, crystal: &CrystalSpec) -> Result<f64> {
    let mismatch = intrinsic_mismatch(process, crystal)?;
    if !(mismatch > 0.0) {
        return Err(Error::NoPhaseMatch { mismatch });
    }
    Ok(2.0 * PI / mismatch * 1e6)
}

/// Trim (ppm) that places the nominal grating centre exactly on the QPM period
/// of `process` at the crystal's temperature.
pub fn calibrate_trim_ppm(process: &ThreeWaveProcess, crystal: &CrystalSpec) -> Result<f64> {
    let target = qpm_period(process, crystal)?;
    let untrimmed = crystal.with_trim_ppm(0.0).effective_center_period_um();
    Ok((target / untrimmed - 1.0) * 1e6)
}

/// Returns a copy of `crystal` trimmed by [`calibrate_trim_ppm`].
pub fn calibrated(process: &ThreeWaveProcess, crystal: &CrystalSpec) -> Result<CrystalSpec> {
    Ok(crystal.with_trim_ppm(calibrate_trim_ppm(process, crystal)?))
}

/// Solves for the input wavelength `λ_a` (nm) that is phase-matched by the
/// grating centre when the other input is held at `fixed_nm`.
///
/// Bisection inside `bracket_nm`; the returned root is resolved well below
/// 1e-4 nm. For chirped crystals the centre period is used.
pub fn qpm_wavelength(
    fixed_nm: f64,
    crystal: &CrystalSpec,
    kind: ProcessKind,
    bracket_nm: (f64, f64),
) -> Result<f64> {
    let period = crystal.effective_center_period_um();
    let residual = |lambda: f64| -> Result<f64> {
        let p = ThreeWaveProcess::with_kind(kind, lambda, fixed_nm)?;
        phase_mismatch(&p, crystal, period)
    };
    bisect(residual, bracket_nm)
}

/// Solves for the crystal temperature (°C) at which `process` is
/// phase-matched by the grating centre, including thermal expansion.
pub fn qpm_temperature(process: &ThreeWaveProcess, crystal: &CrystalSpec, bracket_c: (f64, f64)) -> Result<f64> {
    let residual = |t: f64| -> Result<f64> {
        let c = crystal.with_temperature(t);
        phase_mismatch(process, &c, c.effective_center_period_um())
    };
    bisect(residual, bracket_c)
}

fn bisect(f: impl Fn(f64) -> Result<f64>, (lo, hi): (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let bracket_err = Error::NoRootInBracket { lo, hi };
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(bracket_err);
    }
    // Run to floating-point resolution; this is far tighter than 1e-4 nm.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
