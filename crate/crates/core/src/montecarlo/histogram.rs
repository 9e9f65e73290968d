use std::io::Write;

use serde::Serialize;

use super::EventStream;
use crate::error::{Error, Result};

/// Bins closer than this many bin widths to the peak are excluded from the
/// accidental estimate.
pub const SIDE_BIN_EXCLUSION: usize = 5;
const MIN_BINS: usize = 11;

/// Delay histogram of `t2 − t1` with bins centred on integer multiples of
/// the bin width, covering `±half_bins` bins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceHistogram {
    pub bin_ps: u64,
    pub half_bins: usize,
    pub counts: Vec<u64>,
    pub integration_ps: u64,
}

impl CoincidenceHistogram {
    pub fn bin_ns(&self) -> f64 {
        self.bin_ps as f64 * 1e-3
    }

    pub fn range_ns(&self) -> f64 {
        self.half_bins as f64 * self.bin_ns()
    }

    pub fn integration_s(&self) -> f64 {
        self.integration_ps as f64 * 1e-12
    }

    /// Bin index of delay zero.
    pub fn zero_bin(&self) -> usize {
        self.half_bins
    }

    /// Centre of bin `i`, ns.
    pub fn delay_ns(&self, i: usize) -> f64 {
        (i as i64 - self.half_bins as i64) as f64 * self.bin_ns()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// CSV with header `delay_ns,counts`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "delay_ns,counts")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(out, "{},{}", self.delay_ns(i), c)?;
        }
        Ok(())
    }
}

struct Binning {
    bin: i64,
    half: i64,
}

impl Binning {
    fn new(bin_ns: f64, range_ns: f64) -> Result<Self> {
        if !(bin_ns.is_finite() && bin_ns > 0.0) {
            return Err(Error::invalid("bin_ns", format!("{bin_ns} must be > 0")));
        }
        let bin = (bin_ns * 1e3).round() as i64;
        if bin < 1 {
            return Err(Error::invalid("bin_ns", "must be at least 1 ps"));
        }
        if !(range_ns.is_finite() && range_ns >= 0.0) {
            return Err(Error::invalid("range_ns", format!("{range_ns} must be >= 0")));
        }
        let half = (range_ns / bin_ns + 1e-9).floor() as i64;
        Ok(Self { bin, half })
    }

    /// Bin offset of a delay, with `[k − ½, k + ½)·bin` mapping to `k`.
    fn offset(&self, delay: i64) -> i64 {
        (2 * delay + self.bin).div_euclid(2 * self.bin)
    }

    fn empty(&self, integration_ps: u64) -> CoincidenceHistogram {
        CoincidenceHistogram {
            bin_ps: self.bin as u64,
            half_bins: self.half as usize,
            counts: vec![0; (2 * self.half + 1) as usize],
            integration_ps,
        }
    }
}

fn check_durations(s1: &EventStream, s2: &EventStream) -> Result<()> {
    if s1.duration_ps() != s2.duration_ps() {
        return Err(Error::MismatchedDuration(s1.duration_s(), s2.duration_s()));
    }
    Ok(())
}

/// Histogram of every pairwise delay `t2 − t1` within `±range_ns`, built with
/// a two-pointer sweep whose cost is linear in the pairs inside the window.
pub fn coincidence_histogram(s1: &EventStream, s2: &EventStream, bin_ns: f64, range_ns: f64) -> Result<CoincidenceHistogram> {
    check_durations(s1, s2)?;
    let b = Binning::new(bin_ns, range_ns)?;
    let mut hist = b.empty(s1.duration_ps());
    // Accepted delays satisfy −w ≤ 2·d < w.
    let w = (2 * b.half + 1) * b.bin;
    let t2 = s2.timestamps_ps();
    let mut lo = 0;
    for &t1 in s1.timestamps_ps() {
        let t1 = t1 as i64;
        while lo < t2.len() && 2 * (t2[lo] as i64 - t1) < -w {
            lo += 1;
        }
        for &t in &t2[lo..] {
            let d = t as i64 - t1;
            if 2 * d >= w {
                break;
            }
            hist.counts[(b.offset(d) + b.half) as usize] += 1;
        }
    }
    Ok(hist)
}

/// All-pairs reference implementation of [`coincidence_histogram`].
pub fn brute_force_histogram(s1: &EventStream, s2: &EventStream, bin_ns: f64, range_ns: f64) -> Result<CoincidenceHistogram> {
    check_durations(s1, s2)?;
    let b = Binning::new(bin_ns, range_ns)?;
    let mut hist = b.empty(s1.duration_ps());
    for &t1 in s1.timestamps_ps() {
        for &t2 in s2.timestamps_ps() {
            let k = b.offset(t2 as i64 - t1 as i64);
            if k.abs() <= b.half {
                hist.counts[(k + b.half) as usize] += 1;
            }
        }
    }
    Ok(hist)
}

/// CAR read off a histogram, with its Poisson standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarEstimate {
    pub car: f64,
    pub stderr: f64,
    pub peak_delay_ns: f64,
    pub peak_counts: u64,
    pub accidental_mean: f64,
    pub accidental_bins: usize,
    /// Set when no accidental counts were seen; `car` is then `+inf`.
    pub infinite: bool,
}

/// CAR with the peak at the most populated bin.
pub fn car_from_histogram(hist: &CoincidenceHistogram) -> Result<CarEstimate> {
    let peak = hist
        .counts
        .iter()
        .enumerate()
        .fold((0, 0), |(bi, bc), (i, &c)| if c > bc { (i, c) } else { (bi, bc) })
        .0;
    car_at_bin(hist, peak)
}

/// CAR with the peak at a caller-chosen bin, e.g. the known zero delay.
/// Accidentals are the mean of every bin more than five bins from the peak.
pub fn car_at_bin(hist: &CoincidenceHistogram, peak: usize) -> Result<CarEstimate> {
    let n = hist.counts.len();
    if n < MIN_BINS {
        return Err(Error::TooFewBins { needed: MIN_BINS, got: n });
    }
    if hist.total() == 0 {
        return Err(Error::EmptyHistogram);
    }
    if peak >= n {
        return Err(Error::invalid("peak", format!("bin {peak} outside {n} bins")));
    }
    let side: Vec<u64> = hist
        .counts
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(peak) > SIDE_BIN_EXCLUSION)
        .map(|(_, &c)| c)
        .collect();
    if side.is_empty() {
        return Err(Error::TooFewBins { needed: 2 * SIDE_BIN_EXCLUSION + 2, got: n });
    }
    let side_sum: u64 = side.iter().sum();
    let mean = side_sum as f64 / side.len() as f64;
    let peak_counts = hist.counts[peak];
    let p = peak_counts as f64;
    let (car, stderr, infinite) = if side_sum == 0 {
        (f64::INFINITY, f64::INFINITY, true)
    } else if peak_counts == 0 {
        (0.0, 1.0 / mean, false)
    } else {
        let car = p / mean;
        (car, car * (1.0 / p + 1.0 / side_sum as f64).sqrt(), false)
    };
    Ok(CarEstimate {
        car,
        stderr,
        peak_delay_ns: hist.delay_ns(peak),
        peak_counts,
        accidental_mean: mean,
        accidental_bins: side.len(),
        infinite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::generate_pairs;

    fn hist(counts: Vec<u64>) -> CoincidenceHistogram {
        CoincidenceHistogram {
            bin_ps: 200,
            half_bins: counts.len() / 2,
            counts,
            integration_ps: 1_000_000_000_000,
        }
    }

    #[test]
    fn identical_streams_fill_only_zero_delay() {
        let s = EventStream::new("x", (1..500).map(|i| i * 50_000).collect(), 1e-3, 0).unwrap();
        let h = coincidence_histogram(&s, &s, 0.2, 10.0).unwrap();
        assert_eq!(h.counts.len(), 101);
        assert_eq!(h.counts[h.zero_bin()], 499);
        assert_eq!(h.total(), 499);
    }

    #[test]
    fn bin_edges_are_half_open() {
        let a = EventStream::new("a", vec![10_000], 1e-6, 0).unwrap();
        let b = EventStream::new("b", vec![9_899, 9_900, 10_099, 10_100], 1e-6, 0).unwrap();
        let h = coincidence_histogram(&a, &b, 0.2, 1.0).unwrap();
        assert_eq!(h.counts[h.zero_bin()], 2);
        assert_eq!(h.counts[h.zero_bin() + 1], 1);
        assert_eq!(h.counts[h.zero_bin() - 1], 1);
        assert_eq!(h, brute_force_histogram(&a, &b, 0.2, 1.0).unwrap());
    }

    #[test]
    fn translation_moves_the_peak() {
        let (a, b) = generate_pairs(1e5, 0.01, 20.0, 4).unwrap();
        let base = car_from_histogram(&coincidence_histogram(&a, &b, 0.2, 10.0).unwrap()).unwrap();
        let moved = car_from_histogram(&coincidence_histogram(&a, &b.shifted(3 * 200), 0.2, 10.0).unwrap()).unwrap();
        assert_eq!(base.peak_delay_ns, 0.0);
        assert!((moved.peak_delay_ns - 0.6).abs() < 1e-12);
    }

    #[test]
    fn durations_must_match() {
        let a = EventStream::empty("a", 1.0, 0).unwrap();
        let b = EventStream::empty("b", 2.0, 0).unwrap();
        assert!(matches!(coincidence_histogram(&a, &b, 0.2, 10.0), Err(Error::MismatchedDuration(..))));
    }

    #[test]
    fn flat_histogram_has_unit_car() {
        let e = car_from_histogram(&hist(vec![7; 41])).unwrap();
        assert_eq!(e.car, 1.0);
    }

    #[test]
    fn delta_on_flat() {
        let mut c = vec![10; 41];
        c[20] = 300;
        let e = car_from_histogram(&hist(c)).unwrap();
        assert_eq!(e.car, 30.0);
        assert_eq!(e.accidental_bins, 30);
        assert!((e.stderr - 30.0 * (1.0 / 300.0 + 1.0 / 300.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_histograms() {
        let mut c = vec![0; 41];
        c[20] = 5;
        let e = car_from_histogram(&hist(c)).unwrap();
        assert!(e.infinite && e.car.is_infinite());
        assert!(matches!(car_from_histogram(&hist(vec![0; 41])), Err(Error::EmptyHistogram)));
        assert!(matches!(car_from_histogram(&hist(vec![1; 9])), Err(Error::TooFewBins { .. })));
        let mut centred = vec![1; 11];
        centred[5] = 9;
        assert!(matches!(car_from_histogram(&hist(centred)), Err(Error::TooFewBins { .. })));
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        hist(vec![1, 2, 3]).write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "delay_ns,counts\n-0.2,1\n0,2\n0.2,3\n");
    }
}
