use crate::error::{Error, Result};
use crate::plant::{accel, PlantParams, SimState};
use crate::scalar::{lit, Scalar};

/// Classical fourth-order Runge–Kutta step with the torque held constant.
pub fn rk4_step<T: Scalar>(
    s: &SimState<T>,
    tau_held: T,
    dt: T,
    p: &PlantParams<T>,
) -> Result<SimState<T>> {
    let half = dt * lit(0.5);
    let f = |t: T, th: T, thd: T| {
        let st = SimState::new(t, th, thd);
        (thd, accel(&st, tau_held, p))
    };
    let (k1x, k1v) = f(s.t, s.theta, s.theta_dot);
    let (k2x, k2v) = f(s.t + half, s.theta + half * k1x, s.theta_dot + half * k1v);
    let (k3x, k3v) = f(s.t + half, s.theta + half * k2x, s.theta_dot + half * k2v);
    let (k4x, k4v) = f(s.t + dt, s.theta + dt * k3x, s.theta_dot + dt * k3v);
    let sixth = dt / lit(6.0);
    let two = lit::<T>(2.0);
    let next = SimState::new(
        s.t + dt,
        s.theta + sixth * (k1x + two * k2x + two * k3x + k4x),
        s.theta_dot + sixth * (k1v + two * k2v + two * k3v + k4v),
    );
    if !next.is_finite() {
        return Err(Error::NonFinite {
            what: "plant state",
            t: s.t.to_f64_lossy(),
        });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `θ̈ = -θ̇`: no friction, no disturbances, J = B = 1.
    pub(crate) fn damped_only() -> PlantParams<f64> {
        PlantParams {
            inertia: 1.0,
            damping: 1.0,
            coulomb: 0.0,
            stribeck: 0.0,
            rack_force_amplitude: 0.0,
            tire_torque_amplitude: 0.0,
            ..PlantParams::default()
        }
    }

    fn global_error(dt: f64) -> f64 {
        let p = damped_only();
        let t_end = 1.0;
        let n = (t_end / dt).round() as usize;
        let mut s = SimState::new(0.0, 0.0, 1.0);
        for k in 0..n {
            s = rk4_step(&s, 0.0, dt, &p).unwrap();
            s.t = (k + 1) as f64 * dt;
        }
        let exact_theta = 1.0 - (-t_end).exp();
        let exact_rate = (-t_end).exp();
        (s.theta - exact_theta)
            .abs()
            .max((s.theta_dot - exact_rate).abs())
    }

    #[test]
    fn fourth_order_convergence() {
        let e1 = global_error(0.1);
        let e2 = global_error(0.05);
        let order = (e1 / e2).log2();
        assert!((3.8..=4.2).contains(&order), "order {order}");
    }

    #[test]
    fn cancelling_torque_leaves_state() {
        let p = damped_only();
        let s = SimState::new(0.0, 0.3, 0.0);
        let n = rk4_step(&s, 0.0, 1e-3, &p).unwrap();
        assert_eq!((n.theta, n.theta_dot), (0.3, 0.0));
        assert_eq!(n.t, 1e-3);
    }

    #[test]
    fn free_motion_advances_by_dt() {
        let p = PlantParams {
            damping: 0.0,
            ..damped_only()
        };
        let s = SimState::new(0.0, 0.0, 1.0);
        let n = rk4_step(&s, 0.0, 1e-3, &p).unwrap();
        assert_eq!(n.theta, 1e-3);
        assert_eq!(n.theta_dot, 1.0);
    }

    #[test]
    fn non_finite_is_reported() {
        let s = SimState::new(0.0, 0.0, 0.0);
        let err = rk4_step(&s, f64::NAN, 1e-3, &damped_only()).unwrap_err();
        assert!(err.is_instability());
    }
}
