//! Adaptive-robust time-delay control.
//!
//! ```text
//! τ  = ĝ⁻¹ (û + Δu − f̂),        û = θ̈ᵈ − Ω ė
//! s  = P₃ ė + P₂ e
//! Δu = −ζ s/|s|  (|s| ≥ ε),     −ζ s/ε  otherwise
//! ζ  = (γ̂₀ + γ̂₂ + γ̂₁‖ξ‖ + β + ρ) / (1 − |ḡ|)
//! ```
//!
//! The switching gains move up while the error grows (`sṡ > 0`) or a gain
//! sits on its floor, and down otherwise. β and ρ decay towards their floors
//! and are pushed back up at rate δ once they reach them.

use serde::{Deserialize, Serialize};

use super::{euler_clamped, sat};
use crate::analysis::{LyapunovPair, Mat2};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Which switching gains are adapted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtdcMode {
    /// All five gains adapt.
    #[default]
    Full,
    /// Only γ̂₀ adapts; γ̂₁ = γ̂₂ = β = ρ = 0. Equivalent to a constant-bound
    /// adaptive-robust law.
    GammaZeroOnly,
}

/// Which branch wins when the error grows (`sṡ > 0`) while β or ρ sits on
/// its floor. Both the increase and the decrease predicate hold there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overlap {
    /// Growing error raises the gains regardless of β and ρ.
    #[default]
    Increase,
    /// A floored β or ρ lowers the gains even while the error grows.
    Decrease,
}

/// User-facing design of the delay-compensating law. P₂ and P₃ are not
/// given directly: they come from solving `AᵀP + PA = −Q` with
/// `A = [[0, 1], [−K, −2Ω]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct ArtdcDesign<T> {
    pub k: T,
    pub omega: T,
    pub q: Mat2<T>,
    /// Razumikhin constant r (> 1); only used by the delay-margin analysis.
    pub razumikhin_r: T,
    /// Young's-inequality weight η (> 0); only used by the delay-margin analysis.
    pub eta: T,
    /// Adaptation rates α₀, α₁, α₂.
    pub alpha: [T; 3],
    /// Cubic leak ς on γ̂₂.
    pub leak: T,
    /// Floor recovery rate δ.
    pub recovery: T,
    pub gamma_min: [T; 3],
    pub beta_min: T,
    pub rho_min: T,
    pub gamma_init: [T; 3],
    pub beta_init: T,
    pub rho_init: T,
    pub epsilon: T,
    /// Design bound on the input-gain mismatch |ḡ|.
    pub g_bar_bound: T,
    #[serde(default)]
    pub mode: ArtdcMode,
    #[serde(default)]
    pub overlap: Overlap,
}

impl<T: Scalar> Default for ArtdcDesign<T> {
    fn default() -> Self {
        Self {
            k: T::one(),
            omega: lit(0.5),
            q: Mat2::identity(),
            razumikhin_r: lit(1.01),
            eta: lit(0.7),
            alpha: [lit(0.82), lit(0.82), lit(1.0)],
            leak: lit(0.1),
            recovery: lit(10.0),
            gamma_min: [lit(0.001); 3],
            beta_min: lit(0.05),
            rho_min: lit(0.05),
            gamma_init: [lit(3.0); 3],
            beta_init: lit(2.8),
            rho_init: lit(2.8),
            epsilon: lit(0.1),
            g_bar_bound: lit(0.5),
            mode: ArtdcMode::Full,
            overlap: Overlap::Increase,
        }
    }
}

impl<T: Scalar> ArtdcDesign<T> {
    pub fn lyapunov_pair(&self) -> Result<LyapunovPair<T>> {
        LyapunovPair::new(self.k, self.omega, self.q)
    }

    /// Validates the design and solves for P.
    pub fn build(&self) -> Result<ArtdcParams<T>> {
        let positive = [
            ("alpha[0]", self.alpha[0]),
            ("alpha[1]", self.alpha[1]),
            ("alpha[2]", self.alpha[2]),
            ("leak", self.leak),
            ("recovery", self.recovery),
            ("gamma_min[0]", self.gamma_min[0]),
            ("gamma_min[1]", self.gamma_min[1]),
            ("gamma_min[2]", self.gamma_min[2]),
            ("beta_min", self.beta_min),
            ("rho_min", self.rho_min),
            ("epsilon", self.epsilon),
            ("eta", self.eta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if !(self.razumikhin_r > T::one()) {
            return Err(Error::invalid("razumikhin_r", "must be greater than 1"));
        }
        for i in 0..3 {
            if !(self.gamma_init[i] > self.gamma_min[i]) {
                return Err(Error::invalid("gamma_init", "must exceed gamma_min"));
            }
        }
        if !(self.beta_init > self.beta_min) {
            return Err(Error::invalid("beta_init", "must exceed beta_min"));
        }
        if !(self.rho_init > self.rho_min) {
            return Err(Error::invalid("rho_init", "must exceed rho_min"));
        }
        if !(self.g_bar_bound >= T::zero() && self.g_bar_bound < T::one()) {
            return Err(Error::invalid("g_bar_bound", "must lie in [0, 1)"));
        }
        let pair = self.lyapunov_pair()?;
        Ok(ArtdcParams {
            k: self.k,
            omega: self.omega,
            p2: pair.p.p2(),
            p3: pair.p.p3(),
            alpha: self.alpha,
            leak: self.leak,
            recovery: self.recovery,
            gamma_min: self.gamma_min,
            beta_min: self.beta_min,
            rho_min: self.rho_min,
            gamma_init: self.gamma_init,
            beta_init: self.beta_init,
            rho_init: self.rho_init,
            epsilon: self.epsilon,
            g_bar_bound: self.g_bar_bound,
            mode: self.mode,
            overlap: self.overlap,
        })
    }
}

/// Resolved parameters used at runtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtdcParams<T> {
    pub k: T,
    pub omega: T,
    pub p2: T,
    pub p3: T,
    pub alpha: [T; 3],
    pub leak: T,
    pub recovery: T,
    pub gamma_min: [T; 3],
    pub beta_min: T,
    pub rho_min: T,
    pub gamma_init: [T; 3],
    pub beta_init: T,
    pub rho_init: T,
    pub epsilon: T,
    pub g_bar_bound: T,
    pub mode: ArtdcMode,
    pub overlap: Overlap,
}

impl<T: Scalar> ArtdcParams<T> {
    /// `s = P₃ė + P₂e`.
    #[inline]
    pub fn switching_variable(&self, e: T, e_dot: T) -> T {
        self.p3 * e_dot + self.p2 * e
    }

    fn full(&self) -> bool {
        self.mode == ArtdcMode::Full
    }
}

/// Switching-gain state, including the previous switching variable used
/// to estimate the sign of `sṡ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArtdcGains<T> {
    pub gamma_hat: [T; 3],
    pub beta: T,
    pub rho: T,
    pub s_prev: Option<T>,
}

impl<T: Scalar> ArtdcGains<T> {
    pub fn initial(p: &ArtdcParams<T>) -> Self {
        match p.mode {
            ArtdcMode::Full => Self {
                gamma_hat: p.gamma_init,
                beta: p.beta_init,
                rho: p.rho_init,
                s_prev: None,
            },
            ArtdcMode::GammaZeroOnly => Self {
                gamma_hat: [p.gamma_init[0], T::zero(), T::zero()],
                beta: T::zero(),
                rho: T::zero(),
                s_prev: None,
            },
        }
    }

    /// Euler step with post-step floor clamping; records `s` as the new
    /// previous value. Returns true if any gain hit the ceiling.
    pub(crate) fn apply(&mut self, rates: &ArtdcRates<T>, s: T, dt: T, p: &ArtdcParams<T>) -> bool {
        let mut hit = false;
        let adapted = if p.full() { 3 } else { 1 };
        for i in 0..adapted {
            let (v, h) = euler_clamped(self.gamma_hat[i], rates.gamma[i], dt, p.gamma_min[i]);
            self.gamma_hat[i] = v;
            hit |= h;
        }
        if p.full() {
            let (b, hb) = euler_clamped(self.beta, rates.beta, dt, p.beta_min);
            let (r, hr) = euler_clamped(self.rho, rates.rho, dt, p.rho_min);
            self.beta = b;
            self.rho = r;
            hit |= hb || hr;
        }
        self.s_prev = Some(s);
        hit
    }
}

/// Direction chosen for one switching gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainBranch {
    Increase,
    Decrease,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtdcRates<T> {
    pub gamma: [T; 3],
    pub beta: T,
    pub rho: T,
    pub branches: [GainBranch; 3],
}

/// Torque command before the input delay.
pub fn artdc_control<T: Scalar>(
    e: T,
    e_dot: T,
    theta_dd_d: T,
    g: &ArtdcGains<T>,
    p: &ArtdcParams<T>,
    f_hat: T,
    g_hat: T,
) -> T {
    let xi = e.hypot(e_dot);
    let s = p.switching_variable(e, e_dot);
    let c = g.gamma_hat[0] + g.gamma_hat[2] + g.gamma_hat[1] * xi;
    let zeta = (c + g.beta + g.rho) / (T::one() - p.g_bar_bound.abs());
    let delta_u = -zeta * sat(s, p.epsilon);
    let u_hat = theta_dd_d - p.omega * e_dot;
    (u_hat + delta_u - f_hat) / g_hat
}

/// Selects increase/decrease per γ̂ᵢ.
///
/// A gain at or below its own floor always increases. Otherwise it
/// increases when `sṡ > 0` and decreases when `sṡ ≤ 0`; a floored β or ρ
/// forces a decrease only under [`Overlap::Decrease`]. Without a previous
/// `s` the step counts as `sṡ ≤ 0`. Only signs enter, so `sṡ` is taken as
/// `s (s − s_prev)`.
pub fn gain_branches<T: Scalar>(
    s: T,
    s_prev: Option<T>,
    g: &ArtdcGains<T>,
    p: &ArtdcParams<T>,
) -> [GainBranch; 3] {
    let growing = s_prev.is_some_and(|sp| s * (s - sp) > T::zero());
    let at_recovery_floor = p.full() && (g.beta <= p.beta_min || g.rho <= p.rho_min);
    let shrink = !growing || (at_recovery_floor && p.overlap == Overlap::Decrease);
    std::array::from_fn(|i| {
        if g.gamma_hat[i] <= p.gamma_min[i] || !shrink {
            GainBranch::Increase
        } else {
            GainBranch::Decrease
        }
    })
}

pub fn artdc_gain_rates<T: Scalar>(
    s: T,
    s_prev: Option<T>,
    xi_norm: T,
    g: &ArtdcGains<T>,
    p: &ArtdcParams<T>,
) -> ArtdcRates<T> {
    let branches = gain_branches(s, s_prev, g, p);
    let abs_s = s.abs();
    let signed = |b: GainBranch, v: T| match b {
        GainBranch::Increase => v,
        GainBranch::Decrease => -v,
    };
    let mut gamma = [
        signed(branches[0], p.alpha[0] * abs_s),
        signed(branches[1], p.alpha[1] * xi_norm * abs_s),
        match branches[2] {
            GainBranch::Increase => p.alpha[2] * xi_norm * abs_s,
            GainBranch::Decrease => -p.leak * p.alpha[2] * xi_norm.powi(3),
        },
    ];
    let (beta, rho) = if p.full() {
        let beta = if g.beta > p.beta_min {
            -T::one() / g.beta
        } else {
            p.recovery
        };
        let rho = if g.rho > p.rho_min {
            -abs_s / g.rho
        } else {
            p.recovery * abs_s
        };
        (beta, rho)
    } else {
        gamma[1] = T::zero();
        gamma[2] = T::zero();
        (T::zero(), T::zero())
    };
    ArtdcRates {
        gamma,
        beta,
        rho,
        branches,
    }
}
