use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROUTE_TOLERANCE: f64 = 1e-9;

/// Rotation angle `θ` of one undepleted-pump stage.
///
/// Built either from the coupling route `θ = g·E_p·L` or the power route
/// `θ = (π/2)·√(P/Pmax)`. When both are supplied they must agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingAngle {
    theta: f64,
}

impl MixingAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::invalid("theta", format!("{theta} must be finite and >= 0")));
        }
        Ok(Self { theta })
    }

    /// `g` in 1/(√W·m), `field` as √W, `length_m` in m.
    pub fn from_coupling(g: f64, field: f64, length_m: f64) -> Result<Self> {
        Self::new(g * field * length_m)
    }

    pub fn from_power(power_w: f64, pmax_w: f64) -> Result<Self> {
        if !(pmax_w > 0.0) {
            return Err(Error::invalid("pmax_w", format!("{pmax_w} must be > 0")));
        }
        if !(power_w >= 0.0) {
            return Err(Error::invalid("power_w", format!("{power_w} must be >= 0")));
        }
        Self::new(FRAC_PI_2 * (power_w / pmax_w).sqrt())
    }

    pub fn from_both(g: f64, field: f64, length_m: f64, power_w: f64, pmax_w: f64) -> Result<Self> {
        let a = Self::from_coupling(g, field, length_m)?;
        let b = Self::from_power(power_w, pmax_w)?;
        let scale = a.theta.abs().max(b.theta.abs());
        if (a.theta - b.theta).abs() > ROUTE_TOLERANCE * scale {
            return Err(Error::AngleMismatch {
                from_coupling: a.theta,
                from_power: b.theta,
            });
        }
        Ok(a)
    }

    pub fn radians(&self) -> f64 {
        self.theta
    }

    /// Power transfer `sin²θ` of the stage.
    pub fn transfer(&self) -> f64 {
        self.theta.sin().powi(2)
    }
}

/// Annihilation-operator amplitudes of the up-converted and the signal mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub sfg: Complex64,
    pub signal: Complex64,
}

impl ModeAmplitudes {
    pub fn new(sfg: Complex64, signal: Complex64) -> Self {
        Self { sfg, signal }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sfg.norm_sqr() + self.signal.norm_sqr()
    }

    /// Rotation by an arbitrary signed angle; [`heisenberg_step`] is the
    /// physical special case `θ ≥ 0`.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            sfg: s * self.signal + c * self.sfg,
            signal: -s * self.sfg + c * self.signal,
        }
    }
}

/// Propagates the mode pair through one phase-matched stage:
/// `a_sfg ← sinθ·a_s + cosθ·a_sfg`, `a_s ← −sinθ·a_sfg + cosθ·a_s`.
pub fn heisenberg_step(modes: ModeAmplitudes, angle: &MixingAngle) -> ModeAmplitudes {
    modes.rotate(angle.radians())
}
