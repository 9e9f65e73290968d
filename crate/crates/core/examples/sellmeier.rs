//! Refractive indices of the bundled crystal models.
//!
//! `cargo run --example sellmeier`

use freqshift::dispersion::DispersionLibrary;

fn main() -> freqshift::Result<()> {
    let lib = DispersionLibrary::bundled();
    let wavelengths = [631.0, 1063.9, 1550.0];
    println!("{:<12} {:>8} {:>10} {:>10} {:>10}", "model", "T (°C)", "n(631)", "n(1064)", "n(1550)");
    for name in lib.names() {
        let model = lib.get(name)?;
        for t in [25.0, 60.0] {
            let n: Vec<String> = wavelengths
                .iter()
                .map(|&l| model.refractive_index(l, t).map(|n| format!("{n:10.6}")))
                .collect::<Result<_, _>>()?;
            println!("{name:<12} {t:>8.1} {}", n.join(" "));
        }
    }

    let ln = lib.get("mgo_cln_e")?;
    match ln.refractive_index(200.0, 25.0) {
        Err(e) => println!("\noutside the fitted range: {e}"),
        Ok(n) => println!("\nunexpected index {n}"),
    }
    Ok(())
}
