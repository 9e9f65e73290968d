//! Quasi-phase matching of 1550 nm + 1064 nm sum-frequency generation:
//! grating period, calibration trim and temperature tuning.
//!
//! `cargo run --example qpm_tuning`

use freqshift::dispersion::{
    calibrate_trim_ppm, qpm_period, qpm_temperature, qpm_wavelength, CrystalSpec, DispersionModel, PolingProfile,
    ProcessKind, ThreeWaveProcess,
};

fn main() -> freqshift::Result<()> {
    let model = DispersionModel::bundled("mgo_cln_e")?;
    let crystal = CrystalSpec::new(model, 40.0, PolingProfile::Uniform { period_um: 11.80 }, 30.0)?;
    let sfg = ThreeWaveProcess::sfg(1550.0, 1063.9)?;
    println!("SFG output {:.3} nm", sfg.lambda_out_nm());
    println!("QPM period at 30 °C: {:.4} μm", qpm_period(&sfg, &crystal)?);

    let trim = calibrate_trim_ppm(&sfg, &crystal)?;
    let calibrated = crystal.with_trim_ppm(trim);
    println!("trim onto an 11.80 μm grating: {trim:+.0} ppm");
    println!("phase-matching temperature: {:.4} °C", qpm_temperature(&sfg, &calibrated, (20.0, 80.0))?);

    println!("\n T (°C)   pump (nm)");
    let mut previous: Option<f64> = None;
    for t in (20..=60).step_by(5) {
        let c = calibrated.with_temperature(t as f64);
        let l = qpm_wavelength(1550.0, &c, ProcessKind::Sfg, (1000.0, 1150.0))?;
        let slope = previous.map(|p| format!("  {:+.4} nm/°C", (l - p) / 5.0)).unwrap_or_default();
        println!("{t:>7} {l:>11.4}{slope}");
        previous = Some(l);
    }
    Ok(())
}
