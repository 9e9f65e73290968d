use serde::Serialize;

use crate::error::{Error, Result};
use crate::{wavelength_to_thz, SPEED_OF_LIGHT};

/// Default rate of each higher-order rung relative to the one below it.
pub const DEFAULT_ORDER_ATTENUATION: f64 = 0.003_162_277_660_168_379_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rung {
    pub order: i32,
    pub frequency_thz: f64,
    /// Expected photon rate relative to a first-order rung. Only used to
    /// scale Monte Carlo rates; orders 0 and ±1 carry 1.
    pub relative_rate: f64,
}

/// Frequencies reachable by repeated cascading, `ω_s + j·Δ` for `|j| ≤ k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyLadder {
    pub base_thz: f64,
    /// `Δ = ν_p1 − ν_p2`, GHz.
    pub step_ghz: f64,
    pub max_order: u32,
    pub rungs: Vec<Rung>,
}

impl FrequencyLadder {
    pub fn rung(&self, order: i32) -> Option<&Rung> {
        self.rungs.iter().find(|r| r.order == order)
    }

    /// Replaces the per-order attenuation used for rung rates beyond ±1.
    pub fn with_order_attenuation(mut self, ratio: f64) -> Self {
        for r in &mut self.rungs {
            r.relative_rate = rung_rate(r.order, ratio);
        }
        self
    }
}

fn rung_rate(order: i32, ratio: f64) -> f64 {
    let extra = order.unsigned_abs().saturating_sub(1);
    ratio.powi(extra as i32)
}

/// Ladder of shifted frequencies for a signal at `signal_nm` and pumps at
/// `pump1_nm`, `pump2_nm`. The `+1` rung is SFG with pump 1 followed by DFG
/// with pump 2; the `−1` rung swaps the pumps.
pub fn frequency_ladder(signal_nm: f64, pump1_nm: f64, pump2_nm: f64, max_order: u32) -> Result<FrequencyLadder> {
    if max_order < 1 {
        return Err(Error::invalid("max_order", "must be >= 1"));
    }
    for (name, v) in [("signal_nm", signal_nm), ("pump1_nm", pump1_nm), ("pump2_nm", pump2_nm)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(name, format!("{v} must be > 0")));
        }
    }
    let base_thz = wavelength_to_thz(signal_nm);
    let step_thz = wavelength_to_thz(pump1_nm) - wavelength_to_thz(pump2_nm);
    let k = max_order as i32;
    let rungs = (-k..=k)
        .map(|order| Rung {
            order,
            frequency_thz: base_thz + order as f64 * step_thz,
            relative_rate: rung_rate(order, DEFAULT_ORDER_ATTENUATION),
        })
        .collect();
    Ok(FrequencyLadder {
        base_thz,
        step_ghz: step_thz * 1e3,
        max_order,
        rungs,
    })
}

/// First-order pump detuning `Δλ = λ²·Δf/c` (nm) that produces a shift of
/// `shift_ghz` around `pump_nm`.
pub fn shift_to_pump_detuning(shift_ghz: f64, pump_nm: f64) -> f64 {
    pump_nm * pump_nm * shift_ghz / SPEED_OF_LIGHT
}

/// Pump wavelengths placed symmetrically at `λ ∓ Δλ/2` so that
/// `ν_p1 − ν_p2 = shift_ghz`.
pub fn pump_pair_for_shift(shift_ghz: f64, center_nm: f64) -> (f64, f64) {
    let half = 0.5 * shift_to_pump_detuning(shift_ghz, center_nm);
    (center_nm - half, center_nm + half)
}
