use serde::{Deserialize, Serialize};

use super::DispersionModel;
use crate::error::{Error, Result};

/// Sanity band for poling periods, μm.
pub const PERIOD_BAND_UM: (f64, f64) = (1.0, 100.0);

/// Nominal (as-fabricated, 25 °C) poling period along the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolingProfile {
    Uniform { period_um: f64 },
    /// Period grows linearly from `start_um` at the input face to `end_um`.
    LinearChirp { start_um: f64, end_um: f64 },
}

impl PolingProfile {
    /// Nominal period at fractional position `x ∈ [0, 1]` along the crystal.
    pub fn period_at(&self, x: f64) -> f64 {
        match *self {
            PolingProfile::Uniform { period_um } => period_um,
            PolingProfile::LinearChirp { start_um, end_um } => start_um + (end_um - start_um) * x,
        }
    }

    pub fn center_period_um(&self) -> f64 {
        self.period_at(0.5)
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = PERIOD_BAND_UM;
        let in_band = |p: f64| p.is_finite() && (lo..=hi).contains(&p);
        match *self {
            PolingProfile::Uniform { period_um } if !in_band(period_um) => Err(Error::invalid(
                "poling.period_um",
                format!("{period_um} μm outside [{lo}, {hi}] μm"),
            )),
            PolingProfile::LinearChirp { start_um, end_um } => {
                if !(in_band(start_um) && in_band(end_um)) {
                    Err(Error::invalid(
                        "poling",
                        format!("chirp {start_um}..{end_um} μm outside [{lo}, {hi}] μm"),
                    ))
                } else if start_um > end_um {
                    Err(Error::invalid("poling", "chirp start must not exceed chirp end"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// A poled nonlinear crystal at a given operating temperature.
///
/// The effective local period is the nominal period scaled by the
/// poling-period trim (ppm) and by thermal expansion of the host.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    pub dispersion: DispersionModel,
    pub length_mm: f64,
    pub poling: PolingProfile,
    pub temperature_c: f64,
    pub period_trim_ppm: f64,
}

impl CrystalSpec {
    pub fn new(
        dispersion: DispersionModel,
        length_mm: f64,
        poling: PolingProfile,
        temperature_c: f64,
    ) -> Result<Self> {
        if !(length_mm.is_finite() && length_mm > 0.0) {
            return Err(Error::invalid("length_mm", format!("{length_mm} must be > 0")));
        }
        if !temperature_c.is_finite() {
            return Err(Error::invalid("temperature_c", "must be finite"));
        }
        poling.validate()?;
        Ok(Self {
            dispersion,
            length_mm,
            poling,
            temperature_c,
            period_trim_ppm: 0.0,
        })
    }

    pub fn with_temperature(&self, temperature_c: f64) -> Self {
        Self {
            temperature_c,
            ..self.clone()
        }
    }

    pub fn with_trim_ppm(&self, period_trim_ppm: f64) -> Self {
        Self {
            period_trim_ppm,
            ..self.clone()
        }
    }

    pub fn with_poling(&self, poling: PolingProfile) -> Result<Self> {
        poling.validate()?;
        Ok(Self {
            poling,
            ..self.clone()
        })
    }

    pub fn length_m(&self) -> f64 {
        self.length_mm * 1e-3
    }

    /// Scale from nominal to physical period at the operating temperature.
    pub fn period_scale(&self) -> f64 {
        (1.0 + self.period_trim_ppm * 1e-6) * self.dispersion.expansion_factor(self.temperature_c)
    }

    /// Physical period of the grating centre, μm.
    pub fn effective_center_period_um(&self) -> f64 {
        self.poling.center_period_um() * self.period_scale()
    }

    /// Physical periods at the centres of `segments` equal slices, μm.
    pub fn segment_periods_um(&self, segments: usize) -> Vec<f64> {
        let scale = self.period_scale();
        (0..segments)
            .map(|i| self.poling.period_at((i as f64 + 0.5) / segments as f64) * scale)
            .collect()
    }
}
