//! Config documents, named experiments and parameter sweeps.

mod config;
mod experiments;
mod output;
mod sweep;

pub use config::{
    CarModelSection, CascadeSection, CrystalSection, Crystals, Detectors, FilterSection, GridSpec, Grids,
    MonteCarloSection, PhaseSection, Scenario, ScenarioConfig, SourceSection, SweepDef,
};
pub use experiments::{
    first_sinc_zero, run_experiment, run_montecarlo, shift_point, uniform_equivalent, McPoint, RunOptions, ShiftPoint,
    EXPERIMENTS,
};
pub use output::{linear_fit, Cell, Check, RunSummary, Table};
pub use sweep::{sweep, sweep_analytic, VARIABLES};
