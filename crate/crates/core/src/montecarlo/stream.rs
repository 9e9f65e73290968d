use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timestamped detections on one channel over `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    pub channel: String,
    timestamps_ps: Vec<u64>,
    duration_ps: u64,
    pub seed: u64,
}

impl EventStream {
    /// Validates that timestamps are strictly increasing and inside the span.
    pub fn new(channel: impl Into<String>, timestamps_ps: Vec<u64>, duration_s: f64, seed: u64) -> Result<Self> {
        let duration_ps = seconds_to_ps(duration_s)?;
        if timestamps_ps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("timestamps_ps", "must be strictly increasing"));
        }
        if timestamps_ps.last().is_some_and(|&t| t > duration_ps) {
            return Err(Error::invalid("timestamps_ps", "must lie inside [0, duration]"));
        }
        Ok(Self {
            channel: channel.into(),
            timestamps_ps,
            duration_ps,
            seed,
        })
    }

    pub fn empty(channel: impl Into<String>, duration_s: f64, seed: u64) -> Result<Self> {
        Self::new(channel, Vec::new(), duration_s, seed)
    }

    pub fn timestamps_ps(&self) -> &[u64] {
        &self.timestamps_ps
    }

    pub fn duration_ps(&self) -> u64 {
        self.duration_ps
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_ps as f64 * 1e-12
    }

    pub fn len(&self) -> usize {
        self.timestamps_ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps_ps.is_empty()
    }

    /// Mean count rate, counts/s.
    pub fn rate(&self) -> f64 {
        self.len() as f64 / self.duration_s()
    }

    /// Copy with every timestamp moved by `offset_ps`; events pushed outside
    /// `[0, duration]` are dropped.
    pub fn shifted(&self, offset_ps: i64) -> Self {
        let ts = self
            .timestamps_ps
            .iter()
            .filter_map(|&t| {
                let s = t as i64 + offset_ps;
                (s >= 0 && s as u64 <= self.duration_ps).then_some(s as u64)
            })
            .collect();
        self.with_timestamps(ts)
    }

    fn with_timestamps(&self, timestamps_ps: Vec<u64>) -> Self {
        Self {
            timestamps_ps,
            ..self.clone()
        }
    }
}

fn seconds_to_ps(duration_s: f64) -> Result<u64> {
    if !(duration_s.is_finite() && duration_s > 0.0 && duration_s * 1e12 < u64::MAX as f64) {
        return Err(Error::invalid("duration_s", format!("{duration_s} must be positive and finite")));
    }
    Ok((duration_s * 1e12).round() as u64)
}

fn check_rate(name: &'static str, rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{rate} must be finite and >= 0")))
    }
}

/// Arrival times (ps, sorted, unrounded) of a Poisson process over `[0, end]`.
fn poisson_times(rng: &mut ChaCha8Rng, rate: f64, end_ps: u64) -> Vec<f64> {
    if rate == 0.0 {
        return Vec::new();
    }
    let gap = Exp::new(rate * 1e-12).expect("positive rate");
    let mut out = Vec::with_capacity((rate * end_ps as f64 * 1e-12 * 1.01) as usize + 16);
    let mut t = gap.sample(rng);
    while t <= end_ps as f64 {
        out.push(t);
        t += gap.sample(rng);
    }
    out
}

/// Sorts, then drops repeated picosecond values and anything past `end`.
fn normalize(mut ts: Vec<u64>, end_ps: u64) -> Vec<u64> {
    ts.retain(|&t| t <= end_ps);
    ts.sort_unstable();
    ts.dedup();
    ts
}

/// Poisson pair emission. The first stream carries the emission times, the
/// second the partner times displaced by Gaussian jitter of standard
/// deviation `jitter_ps`. Partners jittered outside the span are lost, and
/// events that collide at picosecond resolution are merged.
pub fn generate_pairs(rate: f64, duration_s: f64, jitter_ps: f64, seed: u64) -> Result<(EventStream, EventStream)> {
    check_rate("rate", rate)?;
    if !(jitter_ps.is_finite() && jitter_ps >= 0.0) {
        return Err(Error::invalid("jitter_ps", format!("{jitter_ps} must be >= 0")));
    }
    let end = seconds_to_ps(duration_s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times = poisson_times(&mut rng, rate, end);
    let jitter = Normal::new(0.0, jitter_ps).expect("valid jitter");
    let mut first = Vec::with_capacity(times.len());
    let mut second = Vec::with_capacity(times.len());
    for t in times {
        first.push(t.round() as u64);
        let p = (t + jitter.sample(&mut rng)).round();
        if p >= 0.0 {
            second.push(p as u64);
        }
    }
    Ok((
        EventStream::new("a", normalize(first, end), duration_s, seed)?,
        EventStream::new("b", normalize(second, end), duration_s, seed)?,
    ))
}

/// Keeps each event independently with probability `p`.
pub fn thin_stream(stream: &EventStream, p: f64, seed: u64) -> Result<EventStream> {
    let keep = Bernoulli::new(p).map_err(|_| Error::invalid("p", format!("{p} must lie in [0, 1]")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = stream.timestamps_ps.iter().copied().filter(|_| keep.sample(&mut rng)).collect();
    Ok(stream.with_timestamps(ts))
}

/// Merges an independent Poisson background of `rate` counts/s.
pub fn add_noise(stream: &EventStream, rate: f64, seed: u64) -> Result<EventStream> {
    check_rate("rate", rate)?;
    if rate == 0.0 {
        return Ok(stream.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ts = stream.timestamps_ps.clone();
    ts.extend(poisson_times(&mut rng, rate, stream.duration_ps).into_iter().map(|t| t.round() as u64));
    Ok(stream.with_timestamps(normalize(ts, stream.duration_ps)))
}

/// Non-paralyzable dead time: an event closer than `dead_time_ps` to the
/// last accepted event is discarded.
pub fn dead_time_filter(stream: &EventStream, dead_time_ps: u64) -> EventStream {
    if dead_time_ps == 0 {
        return stream.clone();
    }
    let mut out = Vec::with_capacity(stream.len());
    let mut last: Option<u64> = None;
    for &t in &stream.timestamps_ps {
        if last.is_none_or(|l| t - l >= dead_time_ps) {
            out.push(t);
            last = Some(t);
        }
    }
    stream.with_timestamps(out)
}

/// A single-photon detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub efficiency: f64,
    pub dead_time_ns: f64,
    /// Dark counts, counts/s.
    #[serde(default)]
    pub dark_rate: f64,
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::invalid("efficiency", format!("{} must lie in [0, 1]", self.efficiency)));
        }
        if !(self.dead_time_ns.is_finite() && self.dead_time_ns >= 0.0) {
            return Err(Error::invalid("dead_time_ns", format!("{} must be >= 0", self.dead_time_ns)));
        }
        check_rate("dark_rate", self.dark_rate)
    }

    pub fn dead_time_ps(&self) -> u64 {
        (self.dead_time_ns * 1e3).round() as u64
    }
}

/// Detection: Bernoulli thinning by the efficiency, dark counts merged, then
/// the non-paralyzable dead time applied to the combined stream so that no
/// two output clicks are closer than the dead time.
pub fn apply_detector(stream: &EventStream, spec: &DetectorSpec, seed: u64) -> Result<EventStream> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s_thin, s_dark) = (rng.random::<u64>(), rng.random::<u64>());
    let detected = thin_stream(stream, spec.efficiency, s_thin)?;
    let noisy = add_noise(&detected, spec.dark_rate, s_dark)?;
    Ok(dead_time_filter(&noisy, spec.dead_time_ps()))
}

/// Two-column text export, `channel,timestamp_ps`, merged in time order.
pub fn write_events(streams: &[&EventStream], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "channel,timestamp_ps")?;
    let mut rows: Vec<(u64, &str)> = streams
        .iter()
        .flat_map(|s| s.timestamps_ps.iter().map(move |&t| (t, s.channel.as_str())))
        .collect();
    rows.sort();
    for (t, c) in rows {
        writeln!(out, "{c},{t}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream(ts: &[u64]) -> EventStream {
        EventStream::new("x", ts.to_vec(), 1e-3, 7).unwrap()
    }

    #[test]
    fn construction_checks_ordering_and_span() {
        assert!(EventStream::new("x", vec![3, 3], 1.0, 0).is_err());
        assert!(EventStream::new("x", vec![5, 2], 1.0, 0).is_err());
        assert!(EventStream::new("x", vec![2_000_000_000_000], 1.0, 0).is_err());
        assert!(EventStream::new("x", vec![], 0.0, 0).is_err());
    }

    #[test]
    fn zero_rate_gives_empty_streams() {
        let (a, b) = generate_pairs(0.0, 1.0, 50.0, 1).unwrap();
        assert!(a.is_empty() && b.is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let x = generate_pairs(1e5, 0.1, 50.0, 42).unwrap();
        let y = generate_pairs(1e5, 0.1, 50.0, 42).unwrap();
        let z = generate_pairs(1e5, 0.1, 50.0, 43).unwrap();
        assert_eq!(x, y);
        assert_ne!(x.0, z.0);
    }

    #[test]
    fn pair_counts_are_poisson() {
        let (rate, duration) = (2e4, 0.05);
        let mean = rate * duration;
        for seed in 0..100 {
            let (a, _) = generate_pairs(rate, duration, 50.0, seed).unwrap();
            assert!((a.len() as f64 - mean).abs() < 4.0 * mean.sqrt(), "seed {seed}: {}", a.len());
        }
    }

    #[test]
    fn thinning_limits_and_fraction() {
        let (a, _) = generate_pairs(1e5, 0.1, 0.0, 3).unwrap();
        assert_eq!(thin_stream(&a, 1.0, 1).unwrap(), a);
        assert!(thin_stream(&a, 0.0, 1).unwrap().is_empty());
        let half = thin_stream(&a, 0.5, 1).unwrap().len() as f64;
        let n = a.len() as f64;
        assert!((half - n / 2.0).abs() < 4.0 * (n * 0.25).sqrt());
        assert!(thin_stream(&a, 1.5, 1).is_err());
    }

    #[test]
    fn noise_merges_poisson_background() {
        let (a, _) = generate_pairs(1e4, 0.1, 0.0, 5).unwrap();
        assert_eq!(add_noise(&a, 0.0, 9).unwrap(), a);
        let merged = add_noise(&a, 5e4, 9).unwrap();
        let expect = a.len() as f64 + 5e3;
        assert!((merged.len() as f64 - expect).abs() < 4.0 * 5e3f64.sqrt());
        assert_eq!(merged, add_noise(&a, 5e4, 9).unwrap());
        assert!(merged.timestamps_ps().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dead_time_examples() {
        let spec = DetectorSpec { efficiency: 1.0, dead_time_ns: 100.0, dark_rate: 0.0 };
        let out = apply_detector(&stream(&[1_000, 51_000]), &spec, 0).unwrap();
        assert_eq!(out.timestamps_ps(), &[1_000]);
        let ideal = DetectorSpec { dead_time_ns: 0.0, ..spec };
        let s = stream(&[1_000, 1_001, 51_000]);
        assert_eq!(apply_detector(&s, &ideal, 0).unwrap(), s);
    }

    #[test]
    fn dead_time_saturates_the_rate() {
        let (a, _) = generate_pairs(5e7, 1e-3, 0.0, 11).unwrap();
        let spec = DetectorSpec { efficiency: 1.0, dead_time_ns: 100.0, dark_rate: 0.0 };
        let out = apply_detector(&a, &spec, 0).unwrap();
        assert!(out.rate() <= 1.0 / 100e-9 + 1.0 / out.duration_s());
    }

    #[test]
    fn shift_and_export() {
        let s = stream(&[10, 20, 999_999_990]);
        assert_eq!(s.shifted(15).timestamps_ps(), &[25, 35]);
        let mut buf = Vec::new();
        let other = EventStream::new("y", vec![15], 1e-3, 0).unwrap();
        write_events(&[&s, &other], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "channel,timestamp_ps\nx,10\ny,15\nx,20\nx,999999990\n");
    }

    proptest! {
        #[test]
        fn dead_time_spacing_holds(rate in 1e6..5e7f64, dead in 1.0..200.0f64, dark in 0.0..1e7f64, seed in 0u64..1000) {
            let (a, _) = generate_pairs(rate, 1e-4, 0.0, seed).unwrap();
            let spec = DetectorSpec { efficiency: 0.7, dead_time_ns: dead, dark_rate: dark };
            let out = apply_detector(&a, &spec, seed).unwrap();
            let d = spec.dead_time_ps();
            prop_assert!(out.timestamps_ps().windows(2).all(|w| w[1] - w[0] >= d));
        }
    }
}
