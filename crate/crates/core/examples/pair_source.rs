//! Coincidence-to-accidental ratio of an SPDC pair source versus pump power.
//!
//! `cargo run --example pair_source`

use freqshift::pairsource::SpdcSourceParams;

fn main() -> freqshift::Result<()> {
    let src = SpdcSourceParams {
        a: 1.25e5,
        alpha: [0.05, 0.05],
        eta: [0.8, 0.8],
        beta: [100.0, 100.0],
        n_n: [1.0e5, 1.0e5],
        delta_tau_s: 0.2e-9,
    };
    src.validate()?;
    let r = src.rational_form();
    println!("CAR = a1·P/(b1·P² + c1) with a1 = {:.4e}, b1 = {:.4e}, c1 = {:.4e}", r.a1, r.b1, r.c1);
    println!("optimum {:.2} mW, peak CAR {:.1}\n", r.optimal_pump_mw(), r.peak_car());

    println!("P (mW)   N1 (c/s)    N2 (c/s)    C (c/s)      CAR");
    for p in [1.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        let (n1, n2) = src.singles_rates(p);
        println!("{p:>6.1}   {n1:>9.0}   {n2:>9.0}   {:>8.1}   {:>7.1}", src.coincidence_rate(p), src.car(p)?);
    }
    Ok(())
}
