//! Tracking control laws.
//!
//! Each law is split into a pure torque function and a pure gain-rate
//! function. The simulation loop owns the gain state and integrates the
//! rates with forward Euler, clamping to the floors afterwards.

mod artdc;
mod asmc;
mod proposed;

pub use artdc::{
    artdc_control, artdc_gain_rates, gain_branches, ArtdcDesign, ArtdcGains, ArtdcMode,
    ArtdcParams, ArtdcRates, GainBranch, Overlap,
};
pub use asmc::{asmc_control, asmc_gain_rate, AsmcGain, AsmcParams};
pub use proposed::{proposed_control, proposed_gain_rates, ProposedGains, ProposedParams};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::plant::Decomposition;
use crate::scalar::{lit, Scalar};

/// Adaptive gains are clamped here so divergence stays finite and visible.
pub const GAIN_CEILING: f64 = 1e9;

/// Largest number of adaptive gains any controller carries.
pub const MAX_GAINS: usize = 5;

/// Filtered tracking error `r = ė + λ e`.
#[inline]
pub fn filtered_error<T: Scalar>(e: T, e_dot: T, lambda: T) -> T {
    e_dot + lambda * e
}

/// Boundary-layer saturation: `r/|r|` outside `|r| < ε`, `r/ε` inside.
#[inline]
pub fn sat<T: Scalar>(r: T, epsilon: T) -> T {
    if r.abs() >= epsilon {
        r.signum()
    } else {
        r / epsilon
    }
}

/// Signum with `sgn(0) = 0`.
#[inline]
pub(crate) fn sgn<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Euclidean norm of `ξ = [e, ė]`.
#[inline]
pub fn xi_norm<T: Scalar>(e: T, e_dot: T) -> T {
    e.hypot(e_dot)
}

/// Applies an Euler step then clamps into `[floor, GAIN_CEILING]`.
/// Returns the new value and whether the ceiling was hit.
#[inline]
pub(crate) fn euler_clamped<T: Scalar>(value: T, rate: T, dt: T, floor: T) -> (T, bool) {
    let ceiling = lit::<T>(GAIN_CEILING);
    let next = value + rate * dt;
    if next.is_nan() {
        return (next, false);
    }
    if next > ceiling {
        (ceiling, true)
    } else if next < floor {
        (floor, false)
    } else {
        (next, false)
    }
}

/// Tracking-error information available to every law at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput<T> {
    pub e: T,
    pub e_dot: T,
    /// Desired acceleration θ̈ᵈ.
    pub theta_dd_d: T,
    /// Nominal model terms; only the delay-compensating law reads them.
    pub nominal: Option<Decomposition<T>>,
}

/// Controller selection and design parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    bound(deserialize = "T: Scalar")
)]
pub enum ControllerConfig<T> {
    Proposed(ProposedParams<T>),
    Asmc(AsmcParams<T>),
    Artdc(ArtdcDesign<T>),
}

impl<T: Scalar> ControllerConfig<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ControllerConfig::Proposed(_) => "proposed",
            ControllerConfig::Asmc(_) => "asmc",
            ControllerConfig::Artdc(_) => "artdc",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ControllerConfig::Proposed(p) => p.validate(),
            ControllerConfig::Asmc(p) => p.validate(),
            ControllerConfig::Artdc(d) => d.build().map(|_| ()),
        }
    }

    /// Builds the runtime controller with its initial gain state.
    pub fn instantiate(&self) -> Result<Controller<T>> {
        Ok(match self {
            ControllerConfig::Proposed(p) => {
                p.validate()?;
                Controller::Proposed(*p, ProposedGains::initial(p))
            }
            ControllerConfig::Asmc(p) => {
                p.validate()?;
                Controller::Asmc(*p, AsmcGain::initial(p))
            }
            ControllerConfig::Artdc(d) => {
                let p = d.build()?;
                Controller::Artdc(p, ArtdcGains::initial(&p))
            }
        })
    }
}

/// A control law together with its owned adaptive-gain state.
#[derive(Debug, Clone, PartialEq)]
pub enum Controller<T> {
    Proposed(ProposedParams<T>, ProposedGains<T>),
    Asmc(AsmcParams<T>, AsmcGain<T>),
    Artdc(ArtdcParams<T>, ArtdcGains<T>),
}

impl<T: Scalar> Controller<T> {
    pub fn needs_nominal(&self) -> bool {
        matches!(self, Controller::Artdc(..))
    }

    /// Column labels for [`Controller::gains`].
    pub fn gain_names(&self) -> &'static [&'static str] {
        match self {
            Controller::Proposed(..) => &["k_hat_0", "k_hat_1"],
            Controller::Asmc(..) => &["k"],
            Controller::Artdc(..) => &["gamma_hat_0", "gamma_hat_1", "gamma_hat_2", "beta", "rho"],
        }
    }

    /// Current gains, padded with zeros up to [`MAX_GAINS`].
    pub fn gains(&self) -> [T; MAX_GAINS] {
        let z = T::zero();
        match self {
            Controller::Proposed(_, g) => [g.k_hat_0, g.k_hat_1, z, z, z],
            Controller::Asmc(_, g) => [g.k, z, z, z, z],
            Controller::Artdc(_, g) => [
                g.gamma_hat[0],
                g.gamma_hat[1],
                g.gamma_hat[2],
                g.beta,
                g.rho,
            ],
        }
    }

    /// Commanded torque for the current tracking error.
    pub fn torque(&self, input: &ControlInput<T>) -> T {
        match self {
            Controller::Proposed(p, g) => {
                proposed_control(input.e, input.e_dot, xi_norm(input.e, input.e_dot), g, p)
            }
            Controller::Asmc(p, g) => asmc_control(
                filtered_error(input.e, input.e_dot, p.lambda),
                g.k,
                p.epsilon,
            ),
            Controller::Artdc(p, g) => {
                let n = input
                    .nominal
                    .expect("delay-compensating law requires the nominal decomposition");
                artdc_control(
                    input.e,
                    input.e_dot,
                    input.theta_dd_d,
                    g,
                    p,
                    n.f_hat,
                    n.g_hat,
                )
            }
        }
    }

    /// Integrates the adaptive gains over one step. Returns true if any gain
    /// was clamped at [`GAIN_CEILING`].
    pub fn advance(&mut self, input: &ControlInput<T>, dt: T) -> bool {
        let xi = xi_norm(input.e, input.e_dot);
        match self {
            Controller::Proposed(p, g) => {
                let r = filtered_error(input.e, input.e_dot, p.lambda);
                let (d0, d1) = proposed_gain_rates(r, xi, g, p);
                let (k0, hit0) = euler_clamped(g.k_hat_0, d0, dt, T::zero());
                let (k1, hit1) = euler_clamped(g.k_hat_1, d1, dt, T::zero());
                g.k_hat_0 = k0;
                g.k_hat_1 = k1;
                hit0 || hit1
            }
            Controller::Asmc(p, g) => {
                let r = filtered_error(input.e, input.e_dot, p.lambda);
                let rate = asmc_gain_rate(r, g.k, p.k_bar, p.mu, p.epsilon);
                let (k, hit) = euler_clamped(g.k, rate, dt, T::neg_infinity());
                g.k = k;
                hit
            }
            Controller::Artdc(p, g) => {
                let s = p.switching_variable(input.e, input.e_dot);
                let rates = artdc_gain_rates(s, g.s_prev, xi, g, p);
                g.apply(&rates, s, dt, p)
            }
        }
    }
}
