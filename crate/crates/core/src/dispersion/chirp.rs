//! Conversion spectrum of uniform and linearly chirped gratings using a
//! piecewise-uniform coherent segment sum.

use num_complex::Complex64;

use super::qpm::{grating_vector, intrinsic_mismatch};
use super::{CrystalSpec, ProcessKind, ThreeWaveProcess};
use crate::error::{Error, Result};

pub const DEFAULT_SEGMENTS: usize = 256;
pub const MIN_SEGMENTS: usize = 8;

/// The swept input `λ_a` varies over the grid while input `b` stays fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessFamily {
    pub fixed_nm: f64,
    pub kind: ProcessKind,
}

impl ProcessFamily {
    pub fn member(&self, lambda_a_nm: f64) -> Result<ThreeWaveProcess> {
        ThreeWaveProcess::with_kind(self.kind, lambda_a_nm, self.fixed_nm)
    }
}

/// Normalized conversion efficiency (NQCE) over a wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionSpectrum {
    pub wavelengths_nm: Vec<f64>,
    /// `|A|²` divided by its maximum over the grid.
    pub nqce: Vec<f64>,
    /// Unnormalized peak `|A|²/L²`, relative to a perfectly matched uniform grating.
    pub peak_efficiency: f64,
}

impl ConversionSpectrum {
    pub fn peak_wavelength_nm(&self) -> f64 {
        let i = argmax(&self.nqce);
        self.wavelengths_nm[i]
    }

    /// Width between the outermost half-maximum crossings, linearly
    /// interpolated. `None` if the curve does not fall below one half on
    /// both sides inside the grid.
    pub fn fwhm_nm(&self) -> Option<f64> {
        let x = &self.wavelengths_nm;
        let y = &self.nqce;
        let first = y.iter().position(|&v| v >= 0.5)?;
        let last = y.iter().rposition(|&v| v >= 0.5)?;
        if first == 0 || last + 1 == y.len() {
            return None;
        }
        let cross = |i0: usize, i1: usize| {
            let t = (0.5 - y[i0]) / (y[i1] - y[i0]);
            x[i0] + t * (x[i1] - x[i0])
        };
        Some((cross(last, last + 1) - cross(first - 1, first)).abs())
    }
}

/// Complex amplitude `Σ ℓ sinc(Δk_i ℓ/2) exp(iφ_i)` of a grating made of equal
/// segments with the given physical periods; `φ_i` accumulates the mismatch
/// phase of all preceding segments plus half of segment `i`.
pub fn grating_amplitude(intrinsic_dk: f64, periods_um: &[f64], length_m: f64) -> Complex64 {
    let seg = length_m / periods_um.len() as f64;
    let mut phase = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for &period in periods_um {
        let dk = intrinsic_dk - grating_vector(period);
        let half = 0.5 * dk * seg;
        let centre = phase + half;
        sum += Complex64::from_polar(seg * sinc(half), centre);
        phase += dk * seg;
    }
    sum
}

/// `|A|²/L²` for one process: 1 for a uniform grating at exact phase matching.
pub fn relative_efficiency(process: &ThreeWaveProcess, crystal: &CrystalSpec, segments: usize) -> Result<f64> {
    check_segments(segments)?;
    let dk0 = intrinsic_mismatch(process, crystal)?;
    let l = crystal.length_m();
    let amp = grating_amplitude(dk0, &crystal.segment_periods_um(segments), l);
    Ok(amp.norm_sqr() / (l * l))
}

/// Normalized conversion spectrum of `crystal` for the family of processes
/// obtained by sweeping `λ_a` over `grid_nm`.
pub fn chirped_response(
    crystal: &CrystalSpec,
    family: &ProcessFamily,
    grid_nm: &[f64],
    segments: usize,
) -> Result<ConversionSpectrum> {
    check_segments(segments)?;
    if grid_nm.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let periods = crystal.segment_periods_um(segments);
    let l = crystal.length_m();
    let raw = grid_nm
        .iter()
        .map(|&lambda| {
            let dk0 = intrinsic_mismatch(&family.member(lambda)?, crystal)?;
            Ok(grating_amplitude(dk0, &periods, l).norm_sqr() / (l * l))
        })
        .collect::<Result<Vec<f64>>>()?;
    let peak = raw[argmax(&raw)];
    let nqce = if peak > 0.0 {
        raw.iter().map(|v| v / peak).collect()
    } else {
        vec![0.0; raw.len()]
    };
    Ok(ConversionSpectrum {
        wavelengths_nm: grid_nm.to_vec(),
        nqce,
        peak_efficiency: peak,
    })
}

/// Unnormalized `sin(x)/x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
        .0
}

fn check_segments(segments: usize) -> Result<()> {
    if segments < MIN_SEGMENTS {
        return Err(Error::invalid("segments", format!("{segments} < {MIN_SEGMENTS}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{calibrated, DispersionModel, PolingProfile};

    fn crystal(poling: PolingProfile) -> CrystalSpec {
        let c = CrystalSpec::new(DispersionModel::bundled("mgo_cln_e").unwrap(), 40.0, poling, 30.0).unwrap();
        calibrated(&ThreeWaveProcess::sfg(1550.0, 1063.9).unwrap(), &c).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    const FAMILY: ProcessFamily = ProcessFamily { fixed_nm: 1550.0, kind: ProcessKind::Sfg };

    #[test]
    fn peak_is_exactly_one() {
        let c = crystal(PolingProfile::LinearChirp { start_um: 11.75, end_um: 11.85 });
        let s = chirped_response(&c, &FAMILY, &grid(1055.0, 1075.0, 401), DEFAULT_SEGMENTS).unwrap();
        assert_eq!(s.nqce.iter().cloned().fold(f64::MIN, f64::max), 1.0);
    }

    #[test]
    fn too_few_segments_rejected() {
        let c = crystal(PolingProfile::Uniform { period_um: 11.8 });
        assert!(chirped_response(&c, &FAMILY, &[1064.0], 4).is_err());
        assert!(chirped_response(&c, &FAMILY, &[], 16).is_err());
    }

    #[test]
    fn uniform_grating_at_phase_matching_has_unit_efficiency() {
        let c = crystal(PolingProfile::Uniform { period_um: 11.8 });
        let p = ThreeWaveProcess::sfg(1063.9, 1550.0).unwrap();
        let eta = relative_efficiency(&p, &c, 64).unwrap();
        assert!((eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wider_chirp_widens_the_band() {
        let g = grid(1040.0, 1090.0, 2001);
        let mut last = 0.0;
        for span in [0.02, 0.05, 0.1, 0.2] {
            let c = crystal(PolingProfile::LinearChirp { start_um: 11.8 - span / 2.0, end_um: 11.8 + span / 2.0 });
            let w = chirped_response(&c, &FAMILY, &g, DEFAULT_SEGMENTS).unwrap().fwhm_nm().unwrap();
            assert!(w > last, "span {span}: {w} <= {last}");
            last = w;
        }
    }

    #[test]
    fn segment_count_converges() {
        let c = crystal(PolingProfile::LinearChirp { start_um: 11.75, end_um: 11.85 });
        let g = grid(1055.0, 1075.0, 801);
        let coarse = chirped_response(&c, &FAMILY, &g, 256).unwrap();
        let fine = chirped_response(&c, &FAMILY, &g, 2048).unwrap();
        let worst = coarse.nqce.iter().zip(&fine.nqce).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-2, "{worst}");
        let (wa, wb) = (coarse.fwhm_nm().unwrap(), fine.fwhm_nm().unwrap());
        assert!((wa - wb).abs() / wb < 1e-2);
    }

    #[test]
    fn fwhm_of_a_triangle() {
        let s = ConversionSpectrum {
            wavelengths_nm: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            nqce: vec![0.0, 0.5, 1.0, 0.5, 0.0],
            peak_efficiency: 1.0,
        };
        assert_eq!(s.fwhm_nm(), Some(2.0));
        let truncated = ConversionSpectrum { nqce: vec![1.0, 0.6, 0.2, 0.0, 0.0], ..s };
        assert_eq!(truncated.fwhm_nm(), None);
    }
}
