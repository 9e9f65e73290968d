//! 100 GHz ITU grid and the super-Gaussian channel filters used to pick out
//! the shifted photon.
//!
//! `cargo run --example channel_filters`

use freqshift::filters::{FilterSpec, ItuChannel};

fn main() -> freqshift::Result<()> {
    let spec = FilterSpec { insertion_loss_db: 0.5, stages: 2, ..FilterSpec::for_channel(ItuChannel::new(34)?) };
    spec.validate()?;
    println!("C34 centre {:.3} THz, peak transmittance {:.3}", spec.center_thz, spec.transmittance(spec.center_thz));
    println!("\noffset (GHz)  transmittance  isolation (dB)");
    for off in [0.0, 25.0, 50.0, 75.0, 100.0, 200.0] {
        println!("{off:>12.0}  {:>13.3e}  {:>14.1}", spec.transmittance_at_offset(off), spec.isolation_db(off));
    }

    println!("\nchannel  centre (THz)  wavelength (nm)");
    for n in 30..=38 {
        let c = ItuChannel::new(n)?;
        println!("{c:>7}  {:>12.1}  {:>15.3}", c.center_thz(), freqshift::thz_to_wavelength(c.center_thz()));
    }
    Ok(())
}
