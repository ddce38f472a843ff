//! Monte Carlo experiment harness and metric definitions.
//!
//! Every experiment is a pure function of (config, seed): each trial draws
//! from its own RNG stream (see [`crate::rng`]), trials run in parallel, and
//! aggregation happens in index order, so outputs are bit-reproducible and
//! independent of thread count.

mod config;
pub mod metrics;
mod output;
mod runs;
mod trial;

pub use config::{BlockIntervals, ExperimentConfig, IntegratorSettings, NetworkSource};
pub use output::{csv_string, write_csv};
pub use runs::{
    run_consensus_probability, run_cycle_demo, run_extremism_experiment,
    run_polarization_experiment, run_trajectory_monotonicity, two_agent_polarization_series,
    ConsensusCell, ConsensusProbabilityResult, CycleDemo, CycleDemoSummary, ExtremismCell,
    ExtremismResult, MonotonicityResult, PolarizationCell, PolarizationResult, PolarizationRow,
    SeriesPoint, EXTREMISM_DEFAULT_B,
};
pub use trial::{draw_initial, TrialOutcome};
