//! Steer-by-wire steering-actuator simulation with adaptive switching-gain
//! tracking controllers and input-delay margin analysis.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

// `!(x > y)` is how parameter checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod controllers;
pub mod error;
pub mod plant;
mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Mat2 = analysis::Mat2<f64>;
pub type PlantParams = plant::PlantParams<f64>;
pub type SimState = plant::SimState<f64>;
pub type NominalModel = plant::NominalModel<f64>;
pub type ControllerConfig = controllers::ControllerConfig<f64>;
pub type Controller = controllers::Controller<f64>;
pub type ProposedParams = controllers::ProposedParams<f64>;
pub type AsmcParams = controllers::AsmcParams<f64>;
pub type ArtdcDesign = controllers::ArtdcDesign<f64>;
pub type Reference = sim::Reference<f64>;
pub type DelayProfile = sim::DelayProfile<f64>;
pub type Scenario = sim::Scenario<f64>;
pub type Trace = sim::Trace<f64>;
pub type ScenarioConfig = config::ScenarioConfig<f64>;
pub type LyapunovPair = analysis::LyapunovPair<f64>;
pub type DelayBoundInputs = analysis::DelayBoundInputs<f64>;
pub type BoundEstimates = analysis::BoundEstimates<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type Mat2 = crate::analysis::Mat2<f32>;
    pub type PlantParams = crate::plant::PlantParams<f32>;
    pub type SimState = crate::plant::SimState<f32>;
    pub type ControllerConfig = crate::controllers::ControllerConfig<f32>;
    pub type Scenario = crate::sim::Scenario<f32>;
    pub type Trace = crate::sim::Trace<f32>;
}
