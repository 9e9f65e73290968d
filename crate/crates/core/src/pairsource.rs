//! SPDC pair-source statistics: pair rate, singles with noise and the
//! source-only coincidence-to-accidental ratio.
//!
//! Pump power `P1` is in mW throughout; rates are per second.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Statistical coefficients of a two-arm SPDC source measured with two
/// detectors. Index 0 is the heralding (reference) arm, index 1 the signal arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdcSourceParams {
    /// Pair generation per unit pump power, pairs/s per mW.
    pub a: f64,
    /// Channel transmittances `α1`, `α2`.
    pub alpha: [f64; 2],
    /// Detector efficiencies `η1`, `η2`.
    pub eta: [f64; 2],
    /// Pump-induced noise `β1`, `β2`, counts/s per mW.
    pub beta: [f64; 2],
    /// Dark and ambient counts `N_n1`, `N_n2`, counts/s.
    pub n_n: [f64; 2],
    /// Coincidence window `Δτ`, s.
    pub delta_tau_s: f64,
}

/// `CAR(P) = 1/(a1·P + b1 + c1/P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalCar {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
}

impl RationalCar {
    pub fn eval(&self, p1_mw: f64) -> f64 {
        1.0 / (self.a1 * p1_mw + self.b1 + self.c1 / p1_mw)
    }

    /// Maximizer `√(c1/a1)`.
    pub fn optimal_pump_mw(&self) -> f64 {
        (self.c1 / self.a1).sqrt()
    }

    pub fn peak_car(&self) -> f64 {
        1.0 / (2.0 * (self.a1 * self.c1).sqrt() + self.b1)
    }
}

impl SpdcSourceParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must be finite and >= 0")))
            }
        };
        let unit = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must lie in [0, 1]")))
            }
        };
        nonneg("a", self.a)?;
        for i in 0..2 {
            unit("alpha", self.alpha[i])?;
            unit("eta", self.eta[i])?;
            nonneg("beta", self.beta[i])?;
            nonneg("n_n", self.n_n[i])?;
        }
        if !(self.delta_tau_s.is_finite() && self.delta_tau_s > 0.0) {
            return Err(Error::invalid("delta_tau_s", format!("{} must be > 0", self.delta_tau_s)));
        }
        Ok(())
    }

    /// Overall detection probability `α_i·η_i` of arm `i`.
    pub fn arm_efficiency(&self, arm: usize) -> f64 {
        self.alpha[arm] * self.eta[arm]
    }

    /// Singles growth per mW, `α_i·η_i·a + β_i`.
    pub fn singles_slope(&self, arm: usize) -> f64 {
        self.arm_efficiency(arm) * self.a + self.beta[arm]
    }

    /// Raw pair rate `N0 = a·P1`.
    pub fn pair_rate(&self, p1_mw: f64) -> f64 {
        self.a * p1_mw
    }

    /// `N_i = α_i·η_i·N0 + β_i·P1 + N_ni`.
    pub fn singles_rates(&self, p1_mw: f64) -> (f64, f64) {
        let n0 = self.pair_rate(p1_mw);
        let arm = |i: usize| self.arm_efficiency(i) * n0 + self.beta[i] * p1_mw + self.n_n[i];
        (arm(0), arm(1))
    }

    /// Detected true coincidence rate `α1·η1·α2·η2·N0`.
    pub fn coincidence_rate(&self, p1_mw: f64) -> f64 {
        self.arm_efficiency(0) * self.arm_efficiency(1) * self.pair_rate(p1_mw)
    }

    /// `CAR = α1η1α2η2·N0 / (N1·N2·Δτ)`.
    pub fn car(&self, p1_mw: f64) -> Result<f64> {
        if !(p1_mw > 0.0) {
            return Err(Error::UndefinedAtZeroPump);
        }
        let (n1, n2) = self.singles_rates(p1_mw);
        Ok(self.coincidence_rate(p1_mw) / (n1 * n2 * self.delta_tau_s))
    }

    /// Coefficients of the rational form of [`car`](Self::car).
    pub fn rational_form(&self) -> RationalCar {
        let g = self.arm_efficiency(0) * self.arm_efficiency(1) * self.a;
        let (u1, u2) = (self.singles_slope(0), self.singles_slope(1));
        let (n1, n2) = (self.n_n[0], self.n_n[1]);
        let k = self.delta_tau_s / g;
        RationalCar {
            a1: u1 * u2 * k,
            b1: (u1 * n2 + u2 * n1) * k,
            c1: n1 * n2 * k,
        }
    }

    pub fn optimal_pump_mw(&self) -> f64 {
        self.rational_form().optimal_pump_mw()
    }
}

/// Free-function form of [`SpdcSourceParams::pair_rate`].
pub fn pair_rate(params: &SpdcSourceParams, p1_mw: f64) -> f64 {
    params.pair_rate(p1_mw)
}

/// Free-function form of [`SpdcSourceParams::singles_rates`].
pub fn singles_rates(params: &SpdcSourceParams, p1_mw: f64) -> (f64, f64) {
    params.singles_rates(p1_mw)
}

/// Free-function form of [`SpdcSourceParams::car`].
pub fn car_spdc(params: &SpdcSourceParams, p1_mw: f64) -> Result<f64> {
    params.car(p1_mw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> SpdcSourceParams {
        SpdcSourceParams {
            a: 1.25e5,
            alpha: [0.05, 0.05],
            eta: [0.8, 0.8],
            beta: [100.0, 100.0],
            n_n: [1e5, 1e5],
            delta_tau_s: 0.2e-9,
        }
    }

    #[test]
    fn pair_rate_is_linear() {
        let p = SpdcSourceParams { a: 1000.0, ..params() };
        assert_eq!(p.pair_rate(0.0), 0.0);
        assert_eq!(p.pair_rate(20.0), 20000.0);
        assert_eq!(p.pair_rate(2.0 * 7.3), 2.0 * p.pair_rate(7.3));
    }

    #[test]
    fn singles_limits() {
        let p = params();
        assert_eq!(p.singles_rates(0.0), (1e5, 1e5));
        let quiet = SpdcSourceParams { beta: [0.0; 2], n_n: [0.0; 2], ..p.clone() };
        let (n1, _) = quiet.singles_rates(20.0);
        assert!((n1 - 0.05 * 0.8 * 1.25e5 * 20.0).abs() < 1e-9);
        let (n1, n2) = p.singles_rates(20.0);
        assert!((n1 - (0.04 * 2.5e6 + 2000.0 + 1e5)).abs() < 1e-9);
        assert_eq!(n1, n2);
    }

    #[test]
    fn car_needs_pump() {
        assert!(matches!(params().car(0.0), Err(Error::UndefinedAtZeroPump)));
    }

    #[test]
    fn rational_form_matches_direct_evaluation() {
        let p = params();
        let r = p.rational_form();
        for p1 in [0.1, 1.0, 19.6, 100.0] {
            let direct = p.car(p1).unwrap();
            assert!((r.eval(p1) - direct).abs() < 1e-12 * direct);
        }
        assert!((r.optimal_pump_mw() - 1e5 / 5100.0).abs() < 1e-9);
        assert!((r.peak_car() - 200.0 / (4.0 * 5100.0 * 1e5 * 0.2e-9)).abs() < 1e-6);
    }

    #[test]
    fn unit_rational_form_peaks_at_two() {
        let r = RationalCar { a1: 1.0, b1: 0.3, c1: 4.0 };
        assert_eq!(r.optimal_pump_mw(), 2.0);
        let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 1e-3).collect();
        let best = grid.iter().cloned().max_by(|a, b| r.eval(*a).total_cmp(&r.eval(*b))).unwrap();
        assert!((best - 2.0).abs() <= 1e-3);
    }

    #[test]
    fn rises_then_falls() {
        let p = params();
        let opt = p.optimal_pump_mw();
        let peak = p.car(opt).unwrap();
        assert!(p.car(0.1 * opt).unwrap() < peak);
        assert!(p.car(10.0 * opt).unwrap() < peak);
    }

    #[test]
    fn noiseless_car_falls_as_inverse_pump() {
        let p = SpdcSourceParams { beta: [0.0; 2], n_n: [0.0; 2], ..params() };
        let ratio = p.car(100.0).unwrap() / p.car(200.0).unwrap();
        assert!((ratio - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn singles_are_affine(a in 1.0..1e6f64, x in 0.0..100.0f64, y in 0.0..100.0f64, n in 0.0..1e5f64) {
            let p = SpdcSourceParams { a, n_n: [n, 2.0 * n], ..params() };
            let (sx, _) = p.singles_rates(x);
            let (sy, _) = p.singles_rates(y);
            let (sxy, _) = p.singles_rates(x + y);
            prop_assert!((sxy + p.n_n[0] - sx - sy).abs() <= 1e-9 * sxy.max(1.0));
            prop_assert!((p.pair_rate(x + y) - p.pair_rate(x) - p.pair_rate(y)).abs() <= 1e-9 * p.pair_rate(x + y).max(1.0));
        }

        #[test]
        fn car_is_unimodal(a in 1e3..1e6f64, al in 0.01..1.0f64, be in 0.0..1e3f64, n in 1.0..1e5f64) {
            let p = SpdcSourceParams { a, alpha: [al, al], beta: [be, 2.0 * be], n_n: [n, n], ..params() };
            let opt = p.optimal_pump_mw();
            let grid: Vec<f64> = (0..400).map(|i| opt * 10f64.powf(-2.0 + 4.0 * i as f64 / 399.0)).collect();
            let car: Vec<f64> = grid.iter().map(|&x| p.car(x).unwrap()).collect();
            let signs: Vec<bool> = car.windows(2).map(|w| w[1] > w[0]).collect();
            let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert_eq!(changes, 1);
        }
    }
}
