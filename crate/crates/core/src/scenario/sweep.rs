//! One-dimensional sweeps over a registered scenario parameter.

use super::config::GridSpec;
use super::experiments::{mc_cells, run_montecarlo, shift_point, with_mc_columns, RunOptions};
use super::output::{Cell, RunSummary, Table};
use super::Scenario;
use crate::carmodel::{car_full, car_vs_cascade_pump, car_vs_spdc_pump, car_vs_temperature, OperatingPoint};
use crate::cascade::cascade_efficiency_split;
use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::montecarlo::PairExperiment;
use crate::wavelength_to_thz;

/// Sweepable parameters. The name doubles as the CSV column header.
///
/// - `source_pump_mw`: source CAR of the unshifted pair.
/// - `spdc_pump_mw`, `cascade_pump_w`, `temperature_c`: rational CAR of the
///   shifted pair with the other two operating-point values held fixed.
/// - `shift_ghz`: CAR of the shifted pair behind a filter that tracks the
///   shifted photon, with the DFG pump detuned accordingly.
pub const VARIABLES: &[&str] = &["source_pump_mw", "spdc_pump_mw", "cascade_pump_w", "temperature_c", "shift_ghz"];

/// Analytic values at one grid point plus the matching pair experiment.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub car: f64,
    pub efficiency: Option<f64>,
    pub experiment: PairExperiment,
}

fn efficiency_column(variable: &str) -> Option<&'static str> {
    match variable {
        "cascade_pump_w" | "shift_ghz" => Some("cascade_efficiency"),
        "temperature_c" => Some("phase_factor"),
        _ => None,
    }
}

/// Evaluates `variable = x` on the scenario's operating point.
pub fn sweep_analytic(scn: &Scenario, variable: &str, x: f64) -> Result<SweepPoint> {
    let car = &scn.car;
    let op0 = scn.operating_point;
    let (pmax1, pmax2) = (scn.pmax.0.watts, scn.pmax.1.watts);
    Ok(match variable {
        "source_pump_mw" => SweepPoint { car: scn.source.car(x)?, efficiency: None, experiment: scn.spdc_experiment(x) },
        "spdc_pump_mw" => SweepPoint {
            car: car_vs_spdc_pump(car, &op0, x)?,
            efficiency: None,
            experiment: scn.shifted_experiment(car, &OperatingPoint { p1_mw: x, ..op0 })?,
        },
        "cascade_pump_w" => SweepPoint {
            car: car_vs_cascade_pump(car, &op0, x)?,
            efficiency: Some(cascade_efficiency_split(x, x, pmax1, pmax2)),
            experiment: scn.shifted_experiment(car, &OperatingPoint { p2_w: x, ..op0 })?,
        },
        "temperature_c" => SweepPoint {
            car: car_vs_temperature(car, &op0, x)?,
            efficiency: Some(car.phase.factor(x)?),
            experiment: scn.shifted_experiment(car, &OperatingPoint { t2_c: x, ..op0 })?,
        },
        "shift_ghz" => {
            let centre = scn.config.filter_spec(scn.config.filters.center_channel);
            let filter = FilterSpec {
                center_thz: wavelength_to_thz(scn.cascade.signal_nm) + x * 1e-3,
                ..centre
            };
            let p = shift_point(scn, x, &filter)?;
            SweepPoint {
                car: car_full(&p.car, &op0)?,
                efficiency: Some(p.efficiency),
                experiment: scn.shifted_experiment(&p.car, &op0)?,
            }
        }
        other => return Err(Error::UnknownVariable(other.to_string())),
    })
}

/// Sweeps `variable` over `grid`, writing `sweep_<variable>.csv` with one row
/// per grid point in grid order.
pub fn sweep(scn: &Scenario, variable: &str, grid: &GridSpec, opts: RunOptions<'_>) -> Result<RunSummary> {
    if !VARIABLES.contains(&variable) {
        return Err(Error::UnknownVariable(variable.to_string()));
    }
    grid.validate("grid")?;
    let xs = grid.points();
    let points = xs.iter().map(|&x| sweep_analytic(scn, variable, x)).collect::<Result<Vec<_>>>()?;

    let mc = opts.montecarlo && scn.config.montecarlo.enabled;
    let mc_points = if mc {
        let exps: Vec<PairExperiment> = points.iter().map(|p| p.experiment).collect();
        Some(run_montecarlo(scn, &exps)?)
    } else {
        None
    };

    let eff_col = efficiency_column(variable);
    let mut base: Vec<&'static str> = vec![VARIABLES.iter().find(|v| **v == variable).copied().unwrap(), "car_analytic"];
    base.extend(eff_col);
    let cols = with_mc_columns(&base, mc);
    let name = format!("sweep_{variable}");
    let mut table = Table::new(name.clone(), &cols);
    for (i, (x, p)) in xs.iter().zip(&points).enumerate() {
        let mut row: Vec<Cell> = vec![(*x).into(), p.car.into()];
        if eff_col.is_some() {
            row.push(p.efficiency.unwrap_or(f64::NAN).into());
        }
        if let Some(m) = &mc_points {
            row.extend(mc_cells(&m[i]));
        }
        table.push(row);
    }

    let mut summary = RunSummary::new(&name, &scn.hash, scn.config.montecarlo.seed, mc);
    summary.meta("variable", variable);
    summary.meta("grid", grid);
    summary.emit(opts.out_dir, &table)?;
    let cars: Vec<f64> = points.iter().map(|p| p.car).collect();
    let best = cars
        .iter()
        .enumerate()
        .fold(0, |b, (i, &c)| if c > cars[b] { i } else { b });
    summary.scalar("peak_car", cars[best]);
    summary.scalar("peak_at", xs[best]);
    if let Some(m) = &mc_points {
        let inside = m.iter().filter(|p| p.within_sigma(3.0)).count();
        summary.scalar("mc_points_within_3_sigma", inside as f64);
    }
    summary.write(opts.out_dir, &name)?;
    Ok(summary)
}
