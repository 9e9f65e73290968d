//! CAR of the frequency-shifted photon against its heralding partner as a
//! function of SPDC pump, cascade pump and crystal temperature.
//!
//! `cargo run --example car_model`

use freqshift::carmodel::{
    car_full, car_vs_cascade_pump, car_vs_spdc_pump, car_vs_temperature, spdc_pump_asymptote, OperatingPoint,
};
use freqshift::scenario::Scenario;

fn main() -> freqshift::Result<()> {
    let scn = Scenario::bundled();
    let (car, op) = (&scn.car, &scn.operating_point);
    println!("operating point: {} mW SPDC pump, {} W cascade pump, {} °C", op.p1_mw, op.p2_w, op.t2_c);
    println!("full CAR {:.2}, noise/signal ratio {:.1}", car_full(car, op)?, car.noise_dominance_ratio(op)?);
    if let Some(w) = car.diagnostics(op)? {
        println!("warning: {w}");
    }

    println!("\nSPDC pump (asymptote {:.1})", spdc_pump_asymptote(car, op)?);
    for p1 in [1.0, 5.0, 20.0, 100.0] {
        let full = car_full(car, &OperatingPoint { p1_mw: p1, ..*op })?;
        println!("  {p1:>6.1} mW  rational {:>6.2}  full {full:>6.2}", car_vs_spdc_pump(car, op, p1)?);
    }
    println!("cascade pump");
    for p2 in [2.0, 8.0, 16.0, 20.0] {
        println!("  {p2:>6.1} W   rational {:>6.2}", car_vs_cascade_pump(car, op, p2)?);
    }
    println!("temperature");
    for t in [29.0, 29.5, 30.0, 30.5, 31.0] {
        println!("  {t:>6.1} °C  rational {:>6.2}", car_vs_temperature(car, op, t)?);
    }
    Ok(())
}
