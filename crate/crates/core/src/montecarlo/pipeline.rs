use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    add_noise, apply_detector, car_at_bin, coincidence_histogram, generate_pairs, CarEstimate,
    CoincidenceHistogram, DetectorSpec,
};
use crate::error::{Error, Result};

/// Independent child seed `tag` of a base seed.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(tag);
    rng.next_u64()
}

/// One detection arm: photons survive to the detector with `survival`,
/// uncorrelated background arrives at `noise_rate` detected counts/s, and the
/// detector adds its own dark counts and dead time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub survival: f64,
    pub noise_rate: f64,
    pub detector: DetectorSpec,
}

impl ArmModel {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.survival) {
            return Err(Error::invalid("survival", format!("{} must lie in [0, 1]", self.survival)));
        }
        if !(self.noise_rate.is_finite() && self.noise_rate >= 0.0) {
            return Err(Error::invalid("noise_rate", format!("{} must be >= 0", self.noise_rate)));
        }
        if self.noise_rate > 0.0 && self.detector.efficiency == 0.0 {
            return Err(Error::invalid("noise_rate", "cannot be detected with zero efficiency"));
        }
        self.detector.validate()
    }

    /// Detection probability of a pair photon.
    pub fn detection(&self) -> f64 {
        self.survival * self.detector.efficiency
    }
}

/// A pair source feeding two arms (index 0 is the heralding arm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairExperiment {
    /// Pairs/s.
    pub pair_rate: f64,
    pub arms: [ArmModel; 2],
}

impl PairExperiment {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_rate.is_finite() && self.pair_rate >= 0.0) {
            return Err(Error::invalid("pair_rate", format!("{} must be >= 0", self.pair_rate)));
        }
        self.arms.iter().try_for_each(ArmModel::validate)
    }

    /// Expected detected singles per arm, ignoring dead time.
    pub fn singles(&self) -> [f64; 2] {
        self.arms
            .map(|a| self.pair_rate * a.detection() + a.noise_rate + a.detector.dark_rate)
    }

    /// Expected true coincidences per second, ignoring dead time.
    pub fn coincidence_rate(&self) -> f64 {
        self.pair_rate * self.arms[0].detection() * self.arms[1].detection()
    }

    /// `C/(N1·N2·Δτ)` for a coincidence window `window_s`.
    pub fn analytic_car(&self, window_s: f64) -> f64 {
        let [n1, n2] = self.singles();
        self.coincidence_rate() / (n1 * n2 * window_s)
    }
}

/// Monte Carlo run controls. Times are in laboratory units; `rate_scale`
/// multiplies every rate and divides every time constant so that the CAR is
/// unchanged while the number of simulated events follows the rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McControls {
    pub seed: u64,
    pub duration_s: f64,
    pub jitter_ps: f64,
    pub bin_ns: f64,
    pub range_ns: f64,
    pub rate_scale: f64,
}

impl McControls {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("duration_s", self.duration_s),
            ("bin_ns", self.bin_ns),
            ("range_ns", self.range_ns),
            ("rate_scale", self.rate_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("{v} must be > 0")));
            }
        }
        if !(self.jitter_ps.is_finite() && self.jitter_ps >= 0.0) {
            return Err(Error::invalid("jitter_ps", format!("{} must be >= 0", self.jitter_ps)));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Fraction of correlated delays (Gaussian, σ = `jitter_ps`) that land in
/// the zero-delay bin of width `bin_ns`.
pub fn bin_capture_fraction(bin_ns: f64, jitter_ps: f64) -> f64 {
    if jitter_ps == 0.0 {
        return 1.0;
    }
    libm::erf(bin_ns * 1e3 / (2.0 * std::f64::consts::SQRT_2 * jitter_ps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineOutcome {
    pub histogram: CoincidenceHistogram,
    pub estimate: CarEstimate,
    /// Histogram CAR predicted from the rates, `1 + f_bin·C/(N1·N2·bin)`.
    pub expected_car: f64,
    /// Analytic CAR with a window equal to one bin.
    pub analytic_car: f64,
    /// Simulated detections per arm.
    pub detections: [usize; 2],
    /// Generated events: surviving pairs, single-arm survivors and background.
    pub events: usize,
}

/// Runs source → loss → background → detector → histogram and reads the CAR
/// at zero delay.
///
/// Loss is sampled by splitting the pair process: pairs where both photons
/// survive are generated as correlated pairs, pairs where only one survives
/// become independent Poisson singles in that arm, and lost pairs are never
/// generated. This has the same distribution as generating every pair and
/// thinning each arm, at a cost proportional to the surviving photons.
pub fn simulate(exp: &PairExperiment, ctl: &McControls) -> Result<PipelineOutcome> {
    exp.validate()?;
    ctl.validate()?;
    let s = ctl.rate_scale;
    let rate = exp.pair_rate * s;
    let [p0, p1] = [exp.arms[0].survival, exp.arms[1].survival];
    let (a, b) = generate_pairs(rate * p0 * p1, ctl.duration_s, ctl.jitter_ps / s, derive_seed(ctl.seed, 0))?;
    let mut events = a.len();
    let orphans = [rate * p0 * (1.0 - p1), rate * p1 * (1.0 - p0)];
    let mut detected = Vec::with_capacity(2);
    for (i, (arm, stream)) in exp.arms.iter().zip([a, b]).enumerate() {
        let tag = 1 + 3 * i as u64;
        let background = if arm.noise_rate > 0.0 { arm.noise_rate * s / arm.detector.efficiency } else { 0.0 };
        let noisy = add_noise(&stream, orphans[i] + background, derive_seed(ctl.seed, tag + 1))?;
        events += noisy.len() - stream.len();
        let detector = DetectorSpec {
            dead_time_ns: arm.detector.dead_time_ns / s,
            dark_rate: arm.detector.dark_rate * s,
            ..arm.detector
        };
        detected.push(apply_detector(&noisy, &detector, derive_seed(ctl.seed, tag + 2))?);
    }
    let histogram = coincidence_histogram(&detected[0], &detected[1], ctl.bin_ns / s, ctl.range_ns / s)?;
    let estimate = car_at_bin(&histogram, histogram.zero_bin())?;
    let analytic_car = exp.analytic_car(ctl.bin_ns * 1e-9);
    Ok(PipelineOutcome {
        expected_car: 1.0 + bin_capture_fraction(ctl.bin_ns, ctl.jitter_ps) * analytic_car,
        analytic_car,
        detections: [detected[0].len(), detected[1].len()],
        events,
        histogram,
        estimate,
    })
}

/// Raw events [`simulate`] generates per second of simulated time at unit
/// rate scale: surviving pair photons plus background.
pub fn expected_event_rate(exp: &PairExperiment) -> f64 {
    let [p0, p1] = [exp.arms[0].survival, exp.arms[1].survival];
    let background: f64 = exp
        .arms
        .iter()
        .map(|a| if a.noise_rate > 0.0 { a.noise_rate / a.detector.efficiency } else { 0.0 })
        .sum();
    exp.pair_rate * (p0 + p1 - p0 * p1) + background
}
