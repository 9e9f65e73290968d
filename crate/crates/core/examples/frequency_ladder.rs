//! Frequency ladder produced by two detuned pumps, and the pump pair needed
//! for a given shift.
//!
//! `cargo run --example frequency_ladder`

use freqshift::cascade::{frequency_ladder, pump_pair_for_shift, shift_to_pump_detuning};
use freqshift::filters::{channels_for_shift, ItuChannel};

fn main() -> freqshift::Result<()> {
    let shift = 400.0;
    let (p1, p2) = pump_pair_for_shift(shift, 1063.9);
    println!("{shift} GHz needs pumps {p1:.4} nm and {p2:.4} nm ({:.4} nm apart)", shift_to_pump_detuning(shift, 1063.9));

    let ladder = frequency_ladder(1550.12, p1, p2, 2)?.with_order_attenuation(10f64.powf(-2.5));
    println!("\norder  frequency (THz)  relative rate");
    for r in &ladder.rungs {
        println!("{:>5}  {:>15.4}  {:>13.2e}", r.order, r.frequency_thz, r.relative_rate);
    }

    let c34 = ItuChannel::new(34)?;
    let (down, up) = channels_for_shift(c34, shift)?;
    println!("\n±{shift} GHz from {c34}: {down} and {up}");
    Ok(())
}
