use serde::{Deserialize, Serialize};

use super::{filtered_error, sat};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Design parameters of the state-dependent adaptive switching law
/// `τ = -γ r - e - (K̂₀ + K̂₁‖ξ‖) sat(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct ProposedParams<T> {
    pub lambda: T,
    pub gamma: T,
    pub alpha0: T,
    pub alpha1: T,
    pub epsilon: T,
    pub k0_init: T,
    pub k1_init: T,
}

impl<T: Scalar> Default for ProposedParams<T> {
    fn default() -> Self {
        Self {
            lambda: lit(100.0),
            gamma: lit(20.0),
            alpha0: lit(0.1),
            alpha1: lit(0.1),
            epsilon: lit(0.1),
            k0_init: lit(0.001),
            k1_init: lit(0.001),
        }
    }
}

impl<T: Scalar> ProposedParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("alpha0", self.alpha0),
            ("alpha1", self.alpha1),
            ("epsilon", self.epsilon),
            ("k0_init", self.k0_init),
            ("k1_init", self.k1_init),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Adaptive gains K̂₀, K̂₁. Both stay non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposedGains<T> {
    pub k_hat_0: T,
    pub k_hat_1: T,
}

impl<T: Scalar> ProposedGains<T> {
    pub fn initial(p: &ProposedParams<T>) -> Self {
        Self {
            k_hat_0: p.k0_init,
            k_hat_1: p.k1_init,
        }
    }
}

pub fn proposed_control<T: Scalar>(
    e: T,
    e_dot: T,
    xi_norm: T,
    g: &ProposedGains<T>,
    p: &ProposedParams<T>,
) -> T {
    let r = filtered_error(e, e_dot, p.lambda);
    let rho = g.k_hat_0 + g.k_hat_1 * xi_norm;
    -p.gamma * r - e - rho * sat(r, p.epsilon)
}

/// `(|r| - α₀K̂₀, |r|‖ξ‖ - α₁K̂₁)`.
pub fn proposed_gain_rates<T: Scalar>(
    r: T,
    xi_norm: T,
    g: &ProposedGains<T>,
    p: &ProposedParams<T>,
) -> (T, T) {
    (
        r.abs() - p.alpha0 * g.k_hat_0,
        r.abs() * xi_norm - p.alpha1 * g.k_hat_1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::euler_clamped;
    use approx::assert_relative_eq;

    fn gains(k0: f64, k1: f64) -> ProposedGains<f64> {
        ProposedGains {
            k_hat_0: k0,
            k_hat_1: k1,
        }
    }

    #[test]
    fn zero_error_zero_torque() {
        let p = ProposedParams::<f64>::default();
        assert_eq!(proposed_control(0.0, 0.0, 0.0, &gains(5.0, 7.0), &p), 0.0);
    }

    #[test]
    fn zero_gains_reduce_to_pd() {
        let p = ProposedParams::<f64>::default();
        let (e, ed) = (0.02f64, -0.5);
        let r = ed + p.lambda * e;
        let tau = proposed_control(e, ed, e.hypot(ed), &gains(0.0, 0.0), &p);
        assert_relative_eq!(tau, -p.gamma * r - e, epsilon = 1e-12);
    }

    #[test]
    fn torque_scalar_oracle() {
        let p = ProposedParams::<f64>::default();
        let tau = proposed_control(0.1, 0.0, 0.1, &gains(0.001, 0.001), &p);
        let expected = -20.0 * 10.0 - 0.1 - (0.001 + 0.001 * 0.1) * 1.0;
        assert_relative_eq!(tau, expected, epsilon = 1e-12);
    }

    #[test]
    fn rates_decay_and_equilibrium() {
        let p = ProposedParams::<f64>::default();
        let (d0, d1) = proposed_gain_rates(0.0, 1.0, &gains(2.0, 3.0), &p);
        assert_relative_eq!(d0, -0.2);
        assert_relative_eq!(d1, -0.3);
        let (d0, _) = proposed_gain_rates(0.5, 1.0, &gains(0.5 / p.alpha0, 0.0), &p);
        assert!(d0.abs() < 1e-12);
    }

    #[test]
    fn k1_converges_to_steady_state() {
        // |r| = 1, ‖ξ‖ = 2, α₁ = 0.1: K̂₁ → |r|‖ξ‖/α₁ = 20.
        let p = ProposedParams::<f64>::default();
        let mut g = gains(0.001, 0.001);
        let dt = 1e-2;
        for _ in 0..20_000 {
            let (_, d1) = proposed_gain_rates(1.0, 2.0, &g, &p);
            g.k_hat_1 = euler_clamped(g.k_hat_1, d1, dt, 0.0).0;
        }
        assert_relative_eq!(g.k_hat_1, 20.0, epsilon = 1e-6);
    }

    #[test]
    fn euler_matches_convolution_solution() {
        // K̂(t) = e^{-αt}K̂(0) + ∫ e^{-α(t-ψ)} |r(ψ)| dψ with |r(ψ)| = |sin ψ|.
        let p = ProposedParams::<f64>::default();
        let (t_end, alpha, k_init) = (5.0, p.alpha0, p.k0_init);
        let oracle = {
            let n = 200_000;
            let h = t_end / n as f64;
            let f = |psi: f64| (-alpha * (t_end - psi)).exp() * psi.sin().abs();
            let mut acc = 0.5 * (f(0.0) + f(t_end));
            for i in 1..n {
                acc += f(i as f64 * h);
            }
            (-alpha * t_end).exp() * k_init + acc * h
        };
        let errors: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|&dt| {
                let steps = (t_end / dt).round() as usize;
                let mut g = gains(k_init, 0.0);
                for k in 0..steps {
                    let r = (k as f64 * dt).sin();
                    let (d0, _) = proposed_gain_rates(r, 0.0, &g, &p);
                    g.k_hat_0 = euler_clamped(g.k_hat_0, d0, dt, 0.0).0;
                }
                (g.k_hat_0 - oracle).abs()
            })
            .collect();
        // first order: halving dt roughly halves the error
        let ratio = errors[0] / errors[1];
        assert!(
            (1.7..2.3).contains(&ratio),
            "ratio {ratio}, errors {errors:?}"
        );
    }

    #[test]
    fn validate_rejects_non_positive() {
        let mut p = ProposedParams::<f64>::default();
        p.k0_init = 0.0;
        assert!(p.validate().is_err());
    }
}
