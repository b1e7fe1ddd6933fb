//! Lyapunov solves, delay margins, ultimate bounds and run metrics.

mod delay_margin;
mod lyapunov;
mod matrix;
mod metrics;
mod ultimate;

pub use delay_margin::{
    constant_bound, constant_bound_error_matrices, delay_bound, delay_report,
    delayed_error_matrices, gain_condition_check, razumikhin_matrix, DelayBoundInputs, DelayReport,
    DelayReportInputs, GainConditionReport,
};
pub use lyapunov::{
    closed_loop_matrix, lyapunov_residual, residual_tolerance, solve_lyapunov, LyapunovPair,
};
pub use matrix::Mat2;
pub use metrics::{improvement_pct, rms, Improvement, Metrics, MetricsAccumulator};
pub use ultimate::{
    estimates_from_plateaus, lyapunov_monitor, ultimate_bound, BoundEstimates, MonitorReport,
    UltimateBound,
};
