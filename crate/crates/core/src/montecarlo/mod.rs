//! Seeded event-level simulation of pair emission, loss, noise, detection
//! and coincidence counting.
//!
//! Timestamps are integer picoseconds. Every stochastic operation takes an
//! explicit seed and is bitwise reproducible.

mod histogram;
mod pipeline;
mod stream;

pub use histogram::{
    brute_force_histogram, car_from_histogram, car_at_bin, coincidence_histogram, CarEstimate,
    CoincidenceHistogram, SIDE_BIN_EXCLUSION,
};
pub use pipeline::{
    bin_capture_fraction, derive_seed, expected_event_rate, simulate, ArmModel, McControls, PairExperiment, PipelineOutcome,
};
pub use stream::{
    add_noise, apply_detector, dead_time_filter, generate_pairs, thin_stream, write_events, DetectorSpec,
    EventStream,
};
