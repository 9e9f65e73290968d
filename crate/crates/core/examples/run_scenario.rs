//! Loads a scenario, runs one named experiment and one sweep, and prints the
//! summary verdicts.
//!
//! `cargo run --release --example run_scenario [scenario.toml] [out-dir]`

use std::path::PathBuf;

use freqshift::scenario::{run_experiment, sweep, GridSpec, RunOptions, Scenario, ScenarioConfig};

fn main() -> freqshift::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = match args.next() {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::bundled(),
    };
    let out_dir = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("freqshift-example"));
    let scn = Scenario::new(config)?;
    println!("scenario {}", &scn.hash[..12]);

    let opts = RunOptions { out_dir: &out_dir, montecarlo: false };
    let summary = run_experiment("fig5b", &scn, opts)?;
    for c in &summary.checks {
        println!("  {:<42} {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }

    let grid = GridSpec { min: 0.0, max: 400.0, steps: 5, log: false };
    let s = sweep(&scn, "shift_ghz", &grid, opts)?;
    println!("sweep peak CAR {:.2} at {} GHz", s.scalars["peak_car"], s.scalars["peak_at"]);
    println!("outputs in {}", out_dir.display());
    Ok(())
}
