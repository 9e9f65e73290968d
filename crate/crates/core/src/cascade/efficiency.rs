use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::ladder::{frequency_ladder, FrequencyLadder};
use crate::dispersion::{relative_efficiency, CrystalSpec, DispersionModel, ThreeWaveProcess};
use crate::error::{Error, Result};
use crate::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};

/// Fraction of the SFG output power that seeds the DFG stage. Fixed by the
/// model, not fitted.
pub const DFG_REINIT_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Sfg,
    Dfg,
}

/// Inputs of the plane-wave saturation power of each stage.
///
/// `n_s`, `n_c` and `n_sfg` are the indices at the signal, shifted and
/// up-converted wavelengths; fill them by hand or from a dispersion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencyParams {
    pub d_eff_pm_per_v: f64,
    pub length_m: f64,
    pub lambda_p_nm: f64,
    pub lambda_s_nm: f64,
    pub lambda_c_nm: f64,
    pub lambda_sfg_nm: f64,
    #[serde(default)]
    pub n_s: Option<f64>,
    #[serde(default)]
    pub n_c: Option<f64>,
    #[serde(default)]
    pub n_sfg: Option<f64>,
    /// Calibrated SFG-stage saturation power, replaces the formula value.
    #[serde(default)]
    pub pmax1_cal_w: Option<f64>,
    /// Calibrated DFG-stage saturation power, replaces the formula value.
    #[serde(default)]
    pub pmax2_cal_w: Option<f64>,
}

impl EfficiencyParams {
    /// Fills the three indices from `model` at `temperature_c`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_dispersion(
        model: &DispersionModel,
        temperature_c: f64,
        d_eff_pm_per_v: f64,
        length_m: f64,
        lambda_p_nm: f64,
        lambda_s_nm: f64,
        lambda_c_nm: f64,
        lambda_sfg_nm: f64,
    ) -> Result<Self> {
        Ok(Self {
            d_eff_pm_per_v,
            length_m,
            lambda_p_nm,
            lambda_s_nm,
            lambda_c_nm,
            lambda_sfg_nm,
            n_s: Some(model.refractive_index(lambda_s_nm, temperature_c)?),
            n_c: Some(model.refractive_index(lambda_c_nm, temperature_c)?),
            n_sfg: Some(model.refractive_index(lambda_sfg_nm, temperature_c)?),
            pmax1_cal_w: None,
            pmax2_cal_w: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d_eff_pm_per_v", self.d_eff_pm_per_v),
            ("length_m", self.length_m),
            ("lambda_p_nm", self.lambda_p_nm),
            ("lambda_s_nm", self.lambda_s_nm),
            ("lambda_c_nm", self.lambda_c_nm),
            ("lambda_sfg_nm", self.lambda_sfg_nm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("{v} must be > 0")));
            }
        }
        let optional = [
            ("n_s", self.n_s),
            ("n_c", self.n_c),
            ("n_sfg", self.n_sfg),
            ("pmax1_cal_w", self.pmax1_cal_w),
            ("pmax2_cal_w", self.pmax2_cal_w),
        ];
        for (name, v) in optional {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::invalid(name, format!("{v} must be > 0")));
                }
            }
        }
        Ok(())
    }
}

/// A stage saturation power and whether it came from calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pmax {
    pub watts: f64,
    pub calibrated: bool,
}

/// `Pmax = ε0·c·n_in·n_sfg·λ_p·λ_sfg·λ_in / (16π²·d_eff²·L)`, where the input
/// is the signal for SFG and the shifted wave for DFG.
pub fn pmax(params: &EfficiencyParams, stage: Stage) -> Result<Pmax> {
    params.validate()?;
    let (override_w, n_in, lambda_in) = match stage {
        Stage::Sfg => (params.pmax1_cal_w, params.n_s.ok_or(Error::MissingDispersion("n_s")), params.lambda_s_nm),
        Stage::Dfg => (params.pmax2_cal_w, params.n_c.ok_or(Error::MissingDispersion("n_c")), params.lambda_c_nm),
    };
    if let Some(watts) = override_w {
        return Ok(Pmax { watts, calibrated: true });
    }
    let n_in = n_in?;
    let n_sfg = params.n_sfg.ok_or(Error::MissingDispersion("n_sfg"))?;
    let d = params.d_eff_pm_per_v * 1e-12;
    let lambdas = params.lambda_p_nm * params.lambda_sfg_nm * lambda_in * 1e-27;
    let watts = VACUUM_PERMITTIVITY * SPEED_OF_LIGHT * n_in * n_sfg * lambdas / (16.0 * PI * PI * d * d * params.length_m);
    Ok(Pmax { watts, calibrated: false })
}

/// Single-stage transfer `sin²((π/2)·√(P/Pmax))`.
pub fn stage_efficiency(power_w: f64, pmax_w: f64) -> f64 {
    (FRAC_PI_2 * (power_w / pmax_w).sqrt()).sin().powi(2)
}

/// Cascaded quantum efficiency with one pump power shared by both stages:
/// `η = ½·sin²((π/2)√(P/Pmax1))·sin²((π/2)√(P/Pmax2))`.
pub fn cascade_efficiency(power_w: f64, pmax1_w: f64, pmax2_w: f64) -> f64 {
    cascade_efficiency_split(power_w, power_w, pmax1_w, pmax2_w)
}

/// As [`cascade_efficiency`] with separate pump powers for the two stages.
pub fn cascade_efficiency_split(p1_w: f64, p2_w: f64, pmax1_w: f64, pmax2_w: f64) -> f64 {
    DFG_REINIT_FRACTION * stage_efficiency(p1_w, pmax1_w) * stage_efficiency(p2_w, pmax2_w)
}

/// Small-signal limit `η ≈ κ·P1·P2` with `κ = ½·(π/2)⁴/(Pmax1·Pmax2)`, in 1/W².
pub fn small_signal_coefficient(pmax1_w: f64, pmax2_w: f64) -> f64 {
    DFG_REINIT_FRACTION * FRAC_PI_2.powi(4) / (pmax1_w * pmax2_w)
}

/// Photon-number efficiency from a power efficiency: `η_power·λ_out/λ_in`.
pub fn quantum_efficiency_from_power(eta_power: f64, lambda_in_nm: f64, lambda_out_nm: f64) -> f64 {
    eta_power * lambda_out_nm / lambda_in_nm
}

/// Inverts [`stage_efficiency`]: the `Pmax` at which `power_w` gives `eta`.
pub fn pmax_from_single_stage_efficiency(eta: f64, power_w: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid("eta", format!("{eta} must lie in (0, 1]")));
    }
    if !(power_w > 0.0) {
        return Err(Error::invalid("power_w", format!("{power_w} must be > 0")));
    }
    let root = eta.sqrt().asin() / FRAC_PI_2;
    Ok(power_w / (root * root))
}

/// Grating response of `process` relative to `reference` in the same crystal.
/// Used to derate a stage whose pump is detuned from the calibration point.
pub fn stage_phase_factor(
    process: &ThreeWaveProcess,
    reference: &ThreeWaveProcess,
    crystal: &CrystalSpec,
    segments: usize,
) -> Result<f64> {
    Ok(relative_efficiency(process, crystal, segments)? / relative_efficiency(reference, crystal, segments)?)
}

/// One cascade operating point inside a given crystal.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeConfig {
    pub signal_nm: f64,
    pub pump1_nm: f64,
    pub pump2_nm: f64,
    /// Power of each pump, W.
    pub power_w: f64,
    /// Optional distinct power for pump 2; defaults to `power_w`.
    pub pump2_power_w: Option<f64>,
    pub crystal: CrystalSpec,
    pub efficiency: EfficiencyParams,
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("signal_nm", self.signal_nm), ("pump1_nm", self.pump1_nm), ("pump2_nm", self.pump2_nm)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("{v} must be > 0")));
            }
        }
        if !(self.power_w >= 0.0) {
            return Err(Error::invalid("power_w", format!("{} must be >= 0", self.power_w)));
        }
        if let Some(p) = self.pump2_power_w {
            if !(p >= 0.0) {
                return Err(Error::invalid("pump2_power_w", format!("{p} must be >= 0")));
            }
        }
        self.efficiency.validate()
    }

    pub fn pump2_power(&self) -> f64 {
        self.pump2_power_w.unwrap_or(self.power_w)
    }

    pub fn sfg_process(&self) -> Result<ThreeWaveProcess> {
        ThreeWaveProcess::sfg(self.signal_nm, self.pump1_nm)
    }

    pub fn dfg_process(&self) -> Result<ThreeWaveProcess> {
        ThreeWaveProcess::dfg(self.sfg_process()?.lambda_out_nm(), self.pump2_nm)
    }

    /// Wavelength of the first-order shifted photon, nm.
    pub fn shifted_nm(&self) -> Result<f64> {
        Ok(self.dfg_process()?.lambda_out_nm())
    }

    pub fn pmax(&self) -> Result<(Pmax, Pmax)> {
        Ok((pmax(&self.efficiency, Stage::Sfg)?, pmax(&self.efficiency, Stage::Dfg)?))
    }

    /// Cascaded efficiency at perfect phase matching of both stages.
    pub fn efficiency(&self) -> Result<f64> {
        let (p1, p2) = self.pmax()?;
        Ok(cascade_efficiency_split(self.power_w, self.pump2_power(), p1.watts, p2.watts))
    }

    /// Cascaded efficiency with each stage derated by its grating response
    /// relative to the calibration point where pump 2 equals pump 1.
    pub fn detuned_efficiency(&self, segments: usize) -> Result<f64> {
        let sfg = self.sfg_process()?;
        let dfg = self.dfg_process()?;
        let dfg_ref = ThreeWaveProcess::dfg(sfg.lambda_out_nm(), self.pump1_nm)?;
        let f2 = stage_phase_factor(&dfg, &dfg_ref, &self.crystal, segments)?;
        let (p1, p2) = self.pmax()?;
        Ok(cascade_efficiency_split(self.power_w, self.pump2_power(), p1.watts, p2.watts / f2))
    }

    pub fn ladder(&self, max_order: u32) -> Result<FrequencyLadder> {
        frequency_ladder(self.signal_nm, self.pump1_nm, self.pump2_nm, max_order)
    }
}
