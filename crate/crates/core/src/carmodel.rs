//! Analytic CAR between the frequency-shifted photon and its heralding
//! partner, as a function of SPDC pump `P1` (mW), cascade pump `P2` (W) and
//! cascade-crystal temperature `T2` (°C).
//!
//! The shifted arm sees converted photons
//! `N2CC = κ·α2η2·N0·P2²·S(T2)`, where `κ` is the small-signal cascade
//! coefficient and `S` the phase-matching factor, on top of Raman noise
//! `β_C·P2` and a dark floor `N_nc`. Under noise dominance the CAR reduces to
//! the three rational forms exposed here.

use serde::{Deserialize, Serialize};

use crate::dispersion::{phase_mismatch, sinc, CrystalSpec, ThreeWaveProcess};
use crate::error::{Error, Result};
use crate::pairsource::SpdcSourceParams;

/// Exponent of the Raman noise in `P2`.
pub const RAMAN_EXPONENT: i32 = 1;
/// Exponent of the converted rate in `P2`.
pub const CONVERSION_EXPONENT: i32 = 2;
/// Below this noise-to-signal ratio the rational forms are flagged.
pub const NOISE_DOMINANCE_THRESHOLD: f64 = 10.0;

/// Temperature dependence `S(T2)` of the converted rate.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum PhaseMatching {
    /// `S = 1` at every temperature.
    Ideal,
    /// `sinc⁴(π·(T − peak)/first_zero_offset)`, independent of dispersion.
    Shorthand { peak_c: f64, first_zero_offset_c: f64 },
    /// `sinc⁴(Δk·L/2)` with `Δk` from the crystal dispersion at `T`, using
    /// the grating centre period.
    Dispersion { crystal: CrystalSpec, process: ThreeWaveProcess },
}

impl PhaseMatching {
    /// Half the accumulated mismatch phase, `Δk·L/2`.
    pub fn mismatch_phase(&self, t2_c: f64) -> Result<f64> {
        match self {
            PhaseMatching::Ideal => Ok(0.0),
            PhaseMatching::Shorthand { peak_c, first_zero_offset_c } => {
                Ok(std::f64::consts::PI * (t2_c - peak_c) / first_zero_offset_c)
            }
            PhaseMatching::Dispersion { crystal, process } => {
                let c = crystal.with_temperature(t2_c);
                let dk = phase_mismatch(process, &c, c.effective_center_period_um())?;
                Ok(0.5 * dk * c.length_m())
            }
        }
    }

    pub fn factor(&self, t2_c: f64) -> Result<f64> {
        Ok(sinc(self.mismatch_phase(t2_c)?).powi(4))
    }
}

/// Rational-form constants. Each is evaluated at the operating point that the
/// corresponding sweep holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalConstants {
    pub a_c1_hat: f64,
    pub b_c1: f64,
    pub a_c2_hat: f64,
    pub b_c2: f64,
}

/// Values held fixed while one variable is swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPoint {
    pub p1_mw: f64,
    pub p2_w: f64,
    pub t2_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarModelParams {
    pub source: SpdcSourceParams,
    /// Transmittance `α'2` of the shifted channel after the cascade.
    pub alpha_c: f64,
    /// Detector efficiency `η'2` on the shifted channel.
    pub eta_c: f64,
    /// Small-signal cascade coefficient `κ`, 1/W².
    pub conversion_per_w2: f64,
    /// Raman noise `β_C`, counts/s per W.
    pub beta_c: f64,
    /// Dark and ambient floor `N_nc` of the shifted channel, counts/s.
    pub n_nc: f64,
    pub phase: PhaseMatching,
    /// Externally supplied constants; derived from the physics when absent.
    pub fitted: Option<RationalConstants>,
}

impl CarModelParams {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        for (name, v) in [("alpha_c", self.alpha_c), ("eta_c", self.eta_c)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, format!("{v} must lie in [0, 1]")));
            }
        }
        for (name, v) in [
            ("conversion_per_w2", self.conversion_per_w2),
            ("beta_c", self.beta_c),
            ("n_nc", self.n_nc),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("{v} must be finite and >= 0")));
            }
        }
        if let Some(f) = &self.fitted {
            for (name, v) in [("a_c1_hat", f.a_c1_hat), ("b_c1", f.b_c1), ("a_c2_hat", f.a_c2_hat), ("b_c2", f.b_c2)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid(name, format!("{v} must be finite and >= 0")));
                }
            }
        }
        Ok(())
    }

    /// `α1·η1·α'2·η'2`.
    fn detection_product(&self) -> f64 {
        self.source.arm_efficiency(0) * self.alpha_c * self.eta_c
    }

    /// Noise on the shifted channel, `β_C·P2^m + N_nc`.
    pub fn shifted_noise(&self, p2_w: f64) -> f64 {
        self.beta_c * p2_w.powi(RAMAN_EXPONENT) + self.n_nc
    }

    /// Probability that an SPDC partner photon leaves the cascade shifted and
    /// reaches the shifted-channel detector, before detection.
    pub fn shifted_survival(&self, p2_w: f64, t2_c: f64) -> Result<f64> {
        Ok(self.conversion_per_w2
            * self.source.arm_efficiency(1)
            * p2_w.powi(CONVERSION_EXPONENT)
            * self.phase.factor(t2_c)?
            * self.alpha_c)
    }

    /// Shifted-channel singles `N'2 = α'2η'2·N2CC + β_C·P2 + N_nc`.
    pub fn shifted_singles(&self, op: &OperatingPoint) -> Result<f64> {
        let n2cc = converted_rate(self, op.p1_mw, op.p2_w, op.t2_c)?;
        Ok(self.alpha_c * self.eta_c * n2cc + self.shifted_noise(op.p2_w))
    }

    /// Constants derived from the noise-dominated singles at `op`:
    /// `a_c1_hat = u1·N'2₀·Δτ`, `b_c1 = N_n1·N'2₀·Δτ`,
    /// `a_c2_hat = N1·Δτ·β_C`, `b_c2 = N1·Δτ·N_nc`.
    pub fn derived_constants(&self, op: &OperatingPoint) -> RationalConstants {
        let s = &self.source;
        let dt = s.delta_tau_s;
        let noise = self.shifted_noise(op.p2_w);
        let (n1, _) = s.singles_rates(op.p1_mw);
        RationalConstants {
            a_c1_hat: s.singles_slope(0) * noise * dt,
            b_c1: s.n_n[0] * noise * dt,
            a_c2_hat: n1 * dt * self.beta_c,
            b_c2: n1 * dt * self.n_nc,
        }
    }

    pub fn constants(&self, op: &OperatingPoint) -> RationalConstants {
        self.fitted.unwrap_or_else(|| self.derived_constants(op))
    }

    /// `(β_C·P2 + N_nc)/(α'2·η'2·N2CC)`; the rational forms assume this is large.
    pub fn noise_dominance_ratio(&self, op: &OperatingPoint) -> Result<f64> {
        let signal = self.alpha_c * self.eta_c * converted_rate(self, op.p1_mw, op.p2_w, op.t2_c)?;
        Ok(self.shifted_noise(op.p2_w) / signal)
    }

    /// A warning when the noise-dominance assumption is weak at `op`.
    pub fn diagnostics(&self, op: &OperatingPoint) -> Result<Option<String>> {
        let ratio = self.noise_dominance_ratio(op)?;
        Ok((ratio < NOISE_DOMINANCE_THRESHOLD).then(|| {
            format!(
                "noise-to-signal ratio {ratio:.3} on the shifted channel is below {NOISE_DOMINANCE_THRESHOLD}; \
                 rational CAR forms overestimate the full model"
            )
        }))
    }
}

/// Converted photon rate `N2CC = κ·α2η2·a·P1·P2²·S(T2)` in counts/s.
pub fn converted_rate(params: &CarModelParams, p1_mw: f64, p2_w: f64, t2_c: f64) -> Result<f64> {
    let s = &params.source;
    Ok(params.conversion_per_w2
        * s.arm_efficiency(1)
        * s.pair_rate(p1_mw)
        * p2_w.powi(CONVERSION_EXPONENT)
        * params.phase.factor(t2_c)?)
}

/// `CAR_C1 = α1η1α'2η'2·a_c1·P1/(a_c1_hat·P1 + b_c1)` at fixed `P2`, `T2`.
pub fn car_vs_spdc_pump(params: &CarModelParams, op: &OperatingPoint, p1_mw: f64) -> Result<f64> {
    if !(p1_mw > 0.0) {
        return Err(Error::UndefinedAtZeroPump);
    }
    let a_c1 = converted_rate(params, 1.0, op.p2_w, op.t2_c)?;
    let k = params.constants(op);
    Ok(params.detection_product() * a_c1 * p1_mw / (k.a_c1_hat * p1_mw + k.b_c1))
}

/// Large-`P1` limit of [`car_vs_spdc_pump`], `α1η1α'2η'2·a_c1/a_c1_hat`.
pub fn spdc_pump_asymptote(params: &CarModelParams, op: &OperatingPoint) -> Result<f64> {
    let a_c1 = converted_rate(params, 1.0, op.p2_w, op.t2_c)?;
    Ok(params.detection_product() * a_c1 / params.constants(op).a_c1_hat)
}

/// `CAR_C2 = K/(a_c2_hat·P2^(m−n) + b_c2·P2^(−n))` at fixed `P1`, `T2`, with
/// `K = α1η1α'2η'2·a_c2`.
pub fn car_vs_cascade_pump(params: &CarModelParams, op: &OperatingPoint, p2_w: f64) -> Result<f64> {
    if !(p2_w > 0.0) {
        return Err(Error::UndefinedAtZeroPump);
    }
    let k = params.constants(op);
    Ok(params.detection_product() * cascade_pump_gain(params, op)? / cascade_pump_denominator(&k, p2_w))
}

/// `a_c2 = N2CC/P2²` at fixed `P1`, `T2`.
pub fn cascade_pump_gain(params: &CarModelParams, op: &OperatingPoint) -> Result<f64> {
    converted_rate(params, op.p1_mw, 1.0, op.t2_c)
}

/// `a_c2_hat·P2^(m−n) + b_c2·P2^(−n)`.
pub fn cascade_pump_denominator(k: &RationalConstants, p2_w: f64) -> f64 {
    k.a_c2_hat * p2_w.powi(RAMAN_EXPONENT - CONVERSION_EXPONENT) + k.b_c2 * p2_w.powi(-CONVERSION_EXPONENT)
}

/// `CAR_C3 = α1η1α'2η'2·a_c3·S(T2)/(N1·N'2₀·Δτ)` at fixed `P1`, `P2`.
pub fn car_vs_temperature(params: &CarModelParams, op: &OperatingPoint, t2_c: f64) -> Result<f64> {
    let a_c3 = converted_rate(params, op.p1_mw, op.p2_w, t2_c)?;
    let k = params.constants(op);
    Ok(params.detection_product() * a_c3 / (k.a_c1_hat * op.p1_mw + k.b_c1))
}

/// CAR without the noise-dominance approximation:
/// `α1η1α'2η'2·N2CC/(N1·N'2·Δτ)`.
pub fn car_full(params: &CarModelParams, op: &OperatingPoint) -> Result<f64> {
    if !(op.p1_mw > 0.0) {
        return Err(Error::UndefinedAtZeroPump);
    }
    let n2cc = converted_rate(params, op.p1_mw, op.p2_w, op.t2_c)?;
    let (n1, _) = params.source.singles_rates(op.p1_mw);
    let n2 = params.shifted_singles(op)?;
    Ok(params.detection_product() * n2cc / (n1 * n2 * params.source.delta_tau_s))
}

/// Least-squares `(a_c1_hat, b_c1)` from a measured `CAR(P1)` curve, using
/// `K/CAR = a_c1_hat + b_c1/P1` with `K = α1η1α'2η'2·a_c1`.
pub fn fit_spdc_pump_curve(gain: f64, p1_mw: &[f64], car: &[f64]) -> Result<(f64, f64)> {
    let rows: Vec<([f64; 2], f64)> = p1_mw.iter().zip(car).map(|(&p, &c)| ([1.0, 1.0 / p], gain / c)).collect();
    least_squares_2(&rows)
}

/// Least-squares `(a_c2_hat, b_c2)` from a measured `CAR(P2)` curve, using
/// `K/CAR = a_c2_hat/P2 + b_c2/P2²`.
pub fn fit_cascade_pump_curve(gain: f64, p2_w: &[f64], car: &[f64]) -> Result<(f64, f64)> {
    let rows: Vec<([f64; 2], f64)> = p2_w.iter().zip(car).map(|(&p, &c)| ([1.0 / p, 1.0 / (p * p)], gain / c)).collect();
    least_squares_2(&rows)
}

fn least_squares_2(rows: &[([f64; 2], f64)]) -> Result<(f64, f64)> {
    if rows.len() < 2 {
        return Err(Error::invalid("fit", format!("needs at least 2 points, got {}", rows.len())));
    }
    let (mut s00, mut s01, mut s11, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ([x0, x1], y) in rows {
        s00 += x0 * x0;
        s01 += x0 * x1;
        s11 += x1 * x1;
        t0 += x0 * y;
        t1 += x1 * y;
    }
    let det = s00 * s11 - s01 * s01;
    if !(det.abs() > f64::EPSILON * s00 * s11) {
        return Err(Error::invalid("fit", "design matrix is singular"));
    }
    Ok(((s11 * t0 - s01 * t1) / det, (s00 * t1 - s01 * t0) / det))
}
