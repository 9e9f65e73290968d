//! The two-pump SFG→DFG cascade: mode rotation, stage saturation powers,
//! cascaded conversion efficiency and the frequency-shift ladder.

mod angle;
mod efficiency;
mod ladder;

pub use angle::{heisenberg_step, MixingAngle, ModeAmplitudes};
pub use efficiency::{
    cascade_efficiency, cascade_efficiency_split, pmax, pmax_from_single_stage_efficiency,
    quantum_efficiency_from_power, small_signal_coefficient, stage_efficiency, stage_phase_factor,
    CascadeConfig, EfficiencyParams, Pmax, Stage, DFG_REINIT_FRACTION,
};
pub use ladder::{frequency_ladder, pump_pair_for_shift, shift_to_pump_detuning, FrequencyLadder, Rung};
