//! Conversion spectrum of a linearly chirped grating against a uniform one
//! of the same length, and how the width grows with the chirp span.
//!
//! `cargo run --example chirped_grating`

use freqshift::dispersion::{
    calibrated, chirped_response, CrystalSpec, DispersionModel, PolingProfile, ProcessFamily, ProcessKind,
    DEFAULT_SEGMENTS,
};

fn main() -> freqshift::Result<()> {
    let model = DispersionModel::bundled("mgo_cln_e")?;
    let chirp = PolingProfile::LinearChirp { start_um: 11.75, end_um: 11.85 };
    let family = ProcessFamily { fixed_nm: 1550.0, kind: ProcessKind::Sfg };
    let base = CrystalSpec::new(model, 40.0, chirp, 30.0)?;
    let crystal = calibrated(&family.member(1063.9)?, &base)?;
    let grid: Vec<f64> = (0..=1400).map(|i| 1050.0 + 0.02 * i as f64).collect();

    let uniform = crystal.with_poling(PolingProfile::Uniform { period_um: 11.80 })?;
    for (label, c) in [("uniform 11.80 μm", &uniform), ("chirp 11.75–11.85 μm", &crystal)] {
        let s = chirped_response(c, &family, &grid, DEFAULT_SEGMENTS)?;
        let width = s.fwhm_nm().map_or("truncated".to_string(), |w| format!("{w:.3} nm"));
        println!(
            "{label:<22} peak at {:.3} nm, FWHM {width}, peak efficiency {:.4}",
            s.peak_wavelength_nm(),
            s.peak_efficiency
        );
    }

    println!("\nspan (μm)  FWHM (nm)");
    for span in [0.0, 0.025, 0.05, 0.1, 0.2] {
        let c = crystal.with_poling(PolingProfile::LinearChirp { start_um: 11.80 - span / 2.0, end_um: 11.80 + span / 2.0 })?;
        let s = chirped_response(&c, &family, &grid, DEFAULT_SEGMENTS)?;
        println!("{span:>9.3}  {}", s.fwhm_nm().map_or("-".into(), |w| format!("{w:.3}")));
    }
    Ok(())
}
