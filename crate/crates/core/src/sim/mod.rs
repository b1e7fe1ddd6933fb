//! Closed-loop simulation: reference, delay line, integrator and traces.

mod delay;
mod integrator;
mod reference;
mod runner;
mod trace;

pub use delay::{delay_sample, DelayLine, DelayProfile};
pub use integrator::rk4_step;
pub use reference::{reference_eval, Reference, ReferenceSample};
pub use runner::{
    calibration_sweep, parallel_map, run_metrics, run_scenario, run_scenario_partial,
    CalibrationPoint, RunOutcome, Scenario, Simulator,
};
pub use trace::{fmt_sig, Sample, Trace, TraceFormat, TraceMeta};
