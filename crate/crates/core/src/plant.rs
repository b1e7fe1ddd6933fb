//! Steer-by-wire steering-actuator dynamics.
//!
//! The steering column obeys
//!
//! ```text
//! J θ̈ + B θ̇ + F(θ̇) + i_rc F_rack(t) + τ_a(t) = τ
//! ```
//!
//! with a Coulomb/Stribeck friction `F` and sinusoidal rack and tire
//! disturbances. Everything here is a pure function of value types.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Physical constants of the steering actuator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct PlantParams<T> {
    /// Equivalent inertia J (kg·m²).
    pub inertia: T,
    /// Equivalent viscous damping B (N·m·s/rad).
    pub damping: T,
    /// Rack-to-column transmission ratio i_rc.
    pub rack_ratio: T,
    /// Coulomb friction amplitude c_f (N·m).
    pub coulomb: T,
    /// Stribeck friction amplitude s_f (N·m).
    pub stribeck: T,
    /// Stribeck velocity v_s (rad/s).
    pub stribeck_velocity: T,
    /// Rack force amplitude F_r (N).
    pub rack_force_amplitude: T,
    /// Rack force frequency ω_r (rad/s).
    pub rack_force_frequency: T,
    /// Tire torque amplitude τ_A (N·m).
    pub tire_torque_amplitude: T,
    /// Tire torque frequency ω_a (rad/s).
    pub tire_torque_frequency: T,
}

impl<T: Scalar> Default for PlantParams<T> {
    fn default() -> Self {
        Self {
            inertia: lit(0.14),
            damping: lit(0.8),
            rack_ratio: lit(8e-3),
            coulomb: lit(0.5),
            stribeck: lit(1.0),
            stribeck_velocity: lit(0.1),
            rack_force_amplitude: lit(1000.0),
            rack_force_frequency: lit(0.03),
            tire_torque_amplitude: lit(5.0),
            tire_torque_frequency: lit(0.05),
        }
    }
}

impl<T: Scalar> PlantParams<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("inertia", self.inertia),
            ("damping", self.damping),
            ("rack_ratio", self.rack_ratio),
            ("coulomb", self.coulomb),
            ("stribeck", self.stribeck),
            ("stribeck_velocity", self.stribeck_velocity),
            ("rack_force_amplitude", self.rack_force_amplitude),
            ("rack_force_frequency", self.rack_force_frequency),
            ("tire_torque_amplitude", self.tire_torque_amplitude),
            ("tire_torque_frequency", self.tire_torque_frequency),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if self.inertia <= T::zero() {
            return Err(Error::invalid("inertia", "must be positive"));
        }
        if self.rack_ratio <= T::zero() {
            return Err(Error::invalid("rack_ratio", "must be positive"));
        }
        if self.damping < T::zero() {
            return Err(Error::invalid("damping", "must be non-negative"));
        }
        if self.stribeck_velocity <= T::zero() {
            return Err(Error::invalid("stribeck_velocity", "must be positive"));
        }
        Ok(())
    }

    /// Scales every parameter by an independent factor drawn from
    /// `[1 - spread, 1 + spread]`.
    pub fn jittered<R: Rng + ?Sized>(&self, rng: &mut R, spread: f64) -> Self {
        let mut j = |v: T| v * lit::<T>(1.0 + rng.random_range(-spread..=spread));
        Self {
            inertia: j(self.inertia),
            damping: j(self.damping),
            rack_ratio: j(self.rack_ratio),
            coulomb: j(self.coulomb),
            stribeck: j(self.stribeck),
            stribeck_velocity: j(self.stribeck_velocity),
            rack_force_amplitude: j(self.rack_force_amplitude),
            rack_force_frequency: j(self.rack_force_frequency),
            tire_torque_amplitude: j(self.tire_torque_amplitude),
            tire_torque_frequency: j(self.tire_torque_frequency),
        }
    }

    /// Upper bound on |F| over all velocities.
    pub fn friction_bound(&self) -> T {
        self.coulomb.abs() + self.stribeck.abs()
    }
}

/// Instantaneous plant sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState<T> {
    pub t: T,
    pub theta: T,
    pub theta_dot: T,
}

impl<T: Scalar> SimState<T> {
    pub fn new(t: T, theta: T, theta_dot: T) -> Self {
        Self {
            t,
            theta,
            theta_dot,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.theta.is_finite() && self.theta_dot.is_finite()
    }
}

/// Known (nominal) inertia and damping used by the delay-compensating law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalModel<T> {
    pub j_hat: T,
    pub b_hat: T,
}

impl<T: Scalar> NominalModel<T> {
    /// `J_hat = 1.5 J`, `B_hat = B`, giving an input-gain mismatch of 0.5.
    pub fn default_for(p: &PlantParams<T>) -> Self {
        Self {
            j_hat: lit::<T>(1.5) * p.inertia,
            b_hat: p.damping,
        }
    }

    /// Input-gain mismatch `g_bar = g / g_hat - 1 = J_hat / J - 1`.
    pub fn g_bar(&self, p: &PlantParams<T>) -> T {
        self.j_hat / p.inertia - T::one()
    }

    /// Checks `0 < J_hat < 2 J`, i.e. `|g_bar| < 1`.
    pub fn validate(&self, p: &PlantParams<T>) -> Result<()> {
        if !(self.j_hat.is_finite() && self.b_hat.is_finite()) {
            return Err(Error::invalid("nominal", "must be finite"));
        }
        let g_bar = self.g_bar(p);
        if self.j_hat <= T::zero() || g_bar.abs() >= T::one() {
            return Err(Error::InputGainMismatch {
                g_bar: g_bar.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Known part of the dynamics, as seen by the delay-compensating controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition<T> {
    /// Nominal drift f̂ (rad/s²).
    pub f_hat: T,
    /// Nominal input gain ĝ = 1 / J_hat.
    pub g_hat: T,
    /// Input-gain mismatch ḡ = J_hat / J - 1.
    pub g_bar: T,
}

/// `F = c_f tanh(θ̇) + s_f exp(-(θ̇ / v_s)²)`.
pub fn friction<T: Scalar>(theta_dot: T, p: &PlantParams<T>) -> T {
    let x = theta_dot / p.stribeck_velocity;
    p.coulomb * theta_dot.tanh() + p.stribeck * (-(x * x)).exp()
}

/// Rack force (N) and tire torque (N·m) at time `t`.
pub fn disturbances<T: Scalar>(t: T, p: &PlantParams<T>) -> (T, T) {
    (
        p.rack_force_amplitude * (p.rack_force_frequency * t).sin(),
        p.tire_torque_amplitude * (p.tire_torque_frequency * t).sin(),
    )
}

/// Everything on the left-hand side except the inertial term.
fn resisting_torque<T: Scalar>(s: &SimState<T>, p: &PlantParams<T>) -> T {
    let (f_rack, tau_a) = disturbances(s.t, p);
    p.damping * s.theta_dot + friction(s.theta_dot, p) + p.rack_ratio * f_rack + tau_a
}

/// Angular acceleration θ̈ under the applied torque.
pub fn accel<T: Scalar>(s: &SimState<T>, tau_applied: T, p: &PlantParams<T>) -> T {
    (tau_applied - resisting_torque(s, p)) / p.inertia
}

/// Full drift term `f = -(B θ̇ + F + i_rc F_rack + τ_a) / J`.
pub fn drift<T: Scalar>(s: &SimState<T>, p: &PlantParams<T>) -> T {
    -resisting_torque(s, p) / p.inertia
}

/// Splits the dynamics into the nominal part used by the controller.
pub fn decompose<T: Scalar>(
    p: &PlantParams<T>,
    n: &NominalModel<T>,
    s: &SimState<T>,
) -> Result<Decomposition<T>> {
    n.validate(p)?;
    Ok(Decomposition {
        f_hat: -(n.b_hat * s.theta_dot) / n.j_hat,
        g_hat: T::one() / n.j_hat,
        g_bar: n.g_bar(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn nominal_plant() -> PlantParams<f64> {
        PlantParams::default()
    }

    #[test]
    fn friction_at_rest_is_stribeck_peak() {
        assert_eq!(friction(0.0, &nominal_plant()), 1.0);
    }

    #[test]
    fn friction_saturates_to_coulomb() {
        assert_relative_eq!(friction(50.0, &nominal_plant()), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn friction_at_stribeck_velocity() {
        let expected = 0.5 * 0.1_f64.tanh() + (-1.0_f64).exp();
        assert_relative_eq!(friction(0.1, &nominal_plant()), expected, epsilon = 1e-15);
    }

    #[test]
    fn disturbances_values() {
        let p = nominal_plant();
        assert_eq!(disturbances(0.0, &p), (0.0, 0.0));
        let (rack, _) = disturbances(std::f64::consts::PI / 0.06, &p);
        assert_relative_eq!(rack, 1000.0, epsilon = 1e-9);
        let (rack, tire) = disturbances(10.0, &p);
        assert_relative_eq!(rack, 1000.0 * 0.3_f64.sin(), epsilon = 1e-12);
        assert_relative_eq!(tire, 5.0 * 0.5_f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn accel_at_rest_only_stribeck() {
        let s = SimState::new(0.0, 0.0, 0.0);
        assert_relative_eq!(
            accel(&s, 0.0, &nominal_plant()),
            -1.0 / 0.14,
            epsilon = 1e-12
        );
    }

    #[test]
    fn accel_zero_when_torque_cancels() {
        let p = nominal_plant();
        let s = SimState::new(3.7, 0.2, -0.4);
        let (rack, tire) = disturbances(s.t, &p);
        let tau = p.damping * s.theta_dot + friction(s.theta_dot, &p) + p.rack_ratio * rack + tire;
        assert!(accel(&s, tau, &p).abs() < 1e-12);
    }

    #[test]
    fn doubling_inertia_halves_accel() {
        let p = nominal_plant();
        let mut p2 = p;
        p2.inertia = 2.0 * p.inertia;
        let s = SimState::new(1.0, 0.0, 0.3);
        assert_relative_eq!(
            accel(&s, 4.0, &p2),
            0.5 * accel(&s, 4.0, &p),
            epsilon = 1e-12
        );
    }

    #[test]
    fn decompose_perfect_model() {
        let p = nominal_plant();
        let n = NominalModel {
            j_hat: p.inertia,
            b_hat: p.damping,
        };
        let s = SimState::new(2.0, 0.1, 0.7);
        let d = decompose(&p, &n, &s).unwrap();
        assert_eq!(d.g_bar, 0.0);
        assert_relative_eq!(d.f_hat, -p.damping * 0.7 / p.inertia, epsilon = 1e-15);
        // remainder carries friction and disturbances only
        let (rack, tire) = disturbances(s.t, &p);
        let rest = -(friction(s.theta_dot, &p) + p.rack_ratio * rack + tire) / p.inertia;
        assert_relative_eq!(drift(&s, &p) - d.f_hat, rest, epsilon = 1e-12);
    }

    #[test]
    fn decompose_default_nominal() {
        let p = nominal_plant();
        let d = decompose(
            &p,
            &NominalModel::default_for(&p),
            &SimState::new(0.0, 0.0, 0.0),
        )
        .unwrap();
        assert_relative_eq!(d.g_bar, 0.5, epsilon = 1e-12);
        assert_relative_eq!(d.g_hat, 1.0 / 0.21, epsilon = 1e-12);
    }

    #[test]
    fn decompose_rejects_large_mismatch() {
        let p = nominal_plant();
        let n = NominalModel {
            j_hat: 2.5 * p.inertia,
            b_hat: p.damping,
        };
        let err = decompose(&p, &n, &SimState::new(0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::InputGainMismatch { .. }));
    }

    #[test]
    fn validate_rejects_bad_inertia() {
        let mut p = nominal_plant();
        p.inertia = 0.0;
        assert!(p.validate().is_err());
        p.inertia = 0.14;
        p.stribeck_velocity = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn generic_over_f32() {
        let p: PlantParams<f32> = PlantParams::default();
        assert_eq!(friction(0.0f32, &p), 1.0);
    }

    proptest! {
        #[test]
        fn friction_bounded(v in -1e3f64..1e3) {
            let p = nominal_plant();
            prop_assert!(friction(v, &p).abs() <= p.friction_bound() + 1e-12);
        }

        #[test]
        fn accel_affine_in_torque(v in -5.0f64..5.0, t in 0.0f64..100.0, tau in -50.0f64..50.0) {
            let p = nominal_plant();
            let s = SimState::new(t, 0.0, v);
            let slope = (accel(&s, tau + 1.0, &p) - accel(&s, tau, &p)) / 1.0;
            prop_assert!((slope - 1.0 / p.inertia).abs() < 1e-9);
        }
    }
}
