//! Two-stage conversion: the mode rotation, stage saturation powers and
//! the cascaded efficiency curve.
//!
//! `cargo run --example cascade_efficiency`

use num_complex::Complex64;

use freqshift::cascade::{
    cascade_efficiency, heisenberg_step, pmax_from_single_stage_efficiency, quantum_efficiency_from_power,
    stage_efficiency, MixingAngle, ModeAmplitudes,
};

fn main() -> freqshift::Result<()> {
    let modes = ModeAmplitudes::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let angle = MixingAngle::from_power(100.0, 487.0)?;
    let out = heisenberg_step(modes, &angle);
    println!("θ = {:.4} rad moves {:.4} of the signal into the SFG mode", angle.radians(), out.sfg.norm_sqr());

    let qe = quantum_efficiency_from_power(0.122, 1550.0, 633.0);
    let pmax = pmax_from_single_stage_efficiency(qe, 10.0)?;
    println!("12.2 % power efficiency → {:.2} % photon efficiency → Pmax = {pmax:.0} W", qe * 100.0);

    println!("\n P (W)   single stage   cascade");
    for p in [1.0, 5.0, 10.0, 16.0, 50.0, 100.0, pmax] {
        println!("{p:>6.0}   {:>12.5}   {:>7.5}", stage_efficiency(p, pmax), cascade_efficiency(p, pmax, pmax));
    }
    Ok(())
}
