//! Ultimate-bound diagnostic and Lyapunov-function monitor for the
//! proposed law.
//!
//! ```text
//! V = ½ J r² + ½ e² + Σ ½ (K̂ᵢ − K*ᵢ)²
//! ϱ = min{γ, λ, αᵢ/2} / max{J/2, 1/2}
//! 𝓑 = (2ς + Σ αᵢ K*ᵢ²) / (2 (ϱ − κ))
//! ```

use serde::{Deserialize, Serialize};

use crate::controllers::filtered_error;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::sim::Trace;

/// User-supplied estimates entering the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimates<T> {
    /// Uncertainty-bound estimates K*₀, K*₁.
    pub k_star: [T; 2],
    /// Bound ς on `Σ K̂ᵢ‖ξ‖ⁱ|r|` inside the boundary layer.
    pub varsigma: T,
    pub kappa: T,
    pub alpha: [T; 2],
    pub gamma: T,
    pub lambda: T,
    pub inertia: T,
}

impl<T: Scalar> BoundEstimates<T> {
    pub fn varrho(&self) -> T {
        let half = lit::<T>(0.5);
        let num = self
            .gamma
            .min(self.lambda)
            .min(self.alpha[0] * half)
            .min(self.alpha[1] * half);
        num / (self.inertia * half).max(half)
    }

    fn weighted_k_star(&self) -> T {
        self.alpha[0] * self.k_star[0] * self.k_star[0]
            + self.alpha[1] * self.k_star[1] * self.k_star[1]
    }

    fn check_kappa(&self) -> Result<T> {
        let varrho = self.varrho();
        if !(self.kappa > T::zero() && self.kappa < varrho) {
            return Err(Error::KappaOutOfRange {
                kappa: self.kappa.to_f64_lossy(),
                varrho: varrho.to_f64_lossy(),
            });
        }
        Ok(varrho - self.kappa)
    }

    /// `V = ½ J r² + ½ e² + Σ ½ (K̂ᵢ − K*ᵢ)²`.
    pub fn lyapunov(&self, e: T, e_dot: T, k_hat: [T; 2]) -> T {
        let half = lit::<T>(0.5);
        let r = filtered_error(e, e_dot, self.lambda);
        let d0 = k_hat[0] - self.k_star[0];
        let d1 = k_hat[1] - self.k_star[1];
        half * (self.inertia * r * r + e * e + d0 * d0 + d1 * d1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UltimateBound<T> {
    pub varrho: T,
    /// `√((ς + Σ αᵢK*ᵢ²) / (ϱ − κ))`, the tighter of the two forms.
    pub radius: T,
    /// `√((2ς + Σ αᵢK*ᵢ²) / (ϱ − κ))`, with the boundary term counted twice.
    pub radius_double_varsigma: T,
    /// Level 𝓑 that V cannot exceed once below it.
    pub level: T,
}

pub fn ultimate_bound<T: Scalar>(est: &BoundEstimates<T>) -> Result<UltimateBound<T>> {
    let gap = est.check_kappa()?;
    let w = est.weighted_k_star();
    let two = lit::<T>(2.0);
    Ok(UltimateBound {
        varrho: est.varrho(),
        radius: ((est.varsigma + w) / gap).sqrt(),
        radius_double_varsigma: ((two * est.varsigma + w) / gap).sqrt(),
        level: (two * est.varsigma + w) / (two * gap),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport<T> {
    pub values: Vec<T>,
    pub v0: T,
    pub level: T,
    pub max: T,
    /// V stayed below `max{V(0), 𝓑}` at every sample.
    pub held: bool,
}

/// Evaluates V along a trace of the proposed law.
pub fn lyapunov_monitor<T: Scalar>(
    trace: &Trace<T>,
    est: &BoundEstimates<T>,
) -> Result<MonitorReport<T>> {
    if trace.is_empty() {
        return Err(Error::EmptySeries);
    }
    let bound = ultimate_bound(est)?;
    let values: Vec<T> = trace
        .samples
        .iter()
        .map(|s| est.lyapunov(s.e, s.e_dot, [s.gains[0], s.gains[1]]))
        .collect();
    let v0 = values[0];
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    let ceiling = v0.max(bound.level);
    // a relative slack absorbs rounding in V itself
    let slack = ceiling * lit(1e-12);
    Ok(MonitorReport {
        held: values.iter().all(|v| *v <= ceiling + slack),
        values,
        v0,
        level: bound.level,
        max,
    })
}

/// Builds estimates from a trace of the proposed law: K*ᵢ from the mean of
/// each gain over the final `tail` fraction of the run, ς from the largest
/// observed `Σ K̂ᵢ‖ξ‖ⁱ|r|` over the whole run, and κ = ϱ/2.
pub fn estimates_from_plateaus<T: Scalar>(
    trace: &Trace<T>,
    alpha: [T; 2],
    gamma: T,
    lambda: T,
    inertia: T,
    tail: f64,
) -> Result<BoundEstimates<T>> {
    if trace.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(Error::invalid("tail", "must lie in (0, 1]"));
    }
    let n = trace.len();
    let start = n - ((n as f64 * tail).ceil() as usize).clamp(1, n);
    let plateau = &trace.samples[start..];
    let count = T::from_usize(plateau.len()).expect("count fits in scalar");
    let mean = |i: usize| plateau.iter().fold(T::zero(), |acc, s| acc + s.gains[i]) / count;
    let varsigma = trace.samples.iter().fold(T::zero(), |acc, s| {
        let r = filtered_error(s.e, s.e_dot, lambda).abs();
        let xi = s.e.hypot(s.e_dot);
        acc.max(s.gains[0] * r + s.gains[1] * xi * r)
    });
    let mut est = BoundEstimates {
        k_star: [mean(0), mean(1)],
        varsigma,
        kappa: T::zero(),
        alpha,
        gamma,
        lambda,
        inertia,
    };
    est.kappa = est.varrho() * lit(0.5);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Sample, TraceMeta};
    use approx::assert_relative_eq;

    fn est() -> BoundEstimates<f64> {
        BoundEstimates {
            k_star: [2.0, 3.0],
            varsigma: 0.4,
            kappa: 0.05,
            alpha: [0.1, 0.1],
            gamma: 20.0,
            lambda: 100.0,
            inertia: 0.14,
        }
    }

    fn trace_of(rows: &[(f64, f64, f64, f64)]) -> Trace<f64> {
        Trace {
            meta: TraceMeta {
                label: "t".into(),
                controller: "proposed".into(),
                gain_names: vec!["k_hat_0".into(), "k_hat_1".into()],
                dt: 1.0,
                duration: rows.len() as f64 - 1.0,
                delay_amplitude: 0.0,
                gain_ceiling_hit: false,
            },
            samples: rows
                .iter()
                .enumerate()
                .map(|(k, &(e, e_dot, k0, k1))| Sample {
                    t: k as f64,
                    theta: 0.0,
                    theta_dot: 0.0,
                    theta_d: 0.0,
                    e,
                    e_dot,
                    tau_cmd: 0.0,
                    tau_applied: 0.0,
                    gains: [k0, k1, 0.0, 0.0, 0.0],
                })
                .collect(),
        }
    }

    #[test]
    fn varrho_for_default_gains() {
        // min{20, 100, 0.05} / max{0.07, 0.5}
        assert_relative_eq!(est().varrho(), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_values() {
        let b = ultimate_bound(&est()).unwrap();
        let w = 0.1 * 4.0 + 0.1 * 9.0;
        assert_relative_eq!(b.radius, ((0.4 + w) / 0.05f64).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(
            b.radius_double_varsigma,
            ((0.8 + w) / 0.05f64).sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(b.level, (0.8 + w) / 0.1, epsilon = 1e-12);
        // V ≥ ½e² turns V ≤ 𝓑 into |e| ≤ √(2𝓑)
        assert_relative_eq!(
            b.radius_double_varsigma,
            (2.0 * b.level).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_estimates_give_zero() {
        let e = BoundEstimates {
            k_star: [0.0, 0.0],
            varsigma: 0.0,
            ..est()
        };
        assert_eq!(ultimate_bound(&e).unwrap().radius, 0.0);
    }

    #[test]
    fn doubling_gap_scales_by_inverse_root_two() {
        // ϱ = 0.1; gap 0.02 at κ = 0.08, 0.04 at κ = 0.06
        let a = ultimate_bound(&BoundEstimates {
            kappa: 0.08,
            ..est()
        })
        .unwrap();
        let b = ultimate_bound(&BoundEstimates {
            kappa: 0.06,
            ..est()
        })
        .unwrap();
        assert_relative_eq!(b.radius / a.radius, 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn kappa_range_enforced() {
        for kappa in [0.0, 0.1, 0.2, -1.0] {
            let err = ultimate_bound(&BoundEstimates { kappa, ..est() }).unwrap_err();
            assert!(matches!(err, Error::KappaOutOfRange { .. }));
        }
    }

    #[test]
    fn converged_trace_has_constant_v() {
        let t = trace_of(&[(0.0, 0.0, 2.0, 3.0); 5]);
        let m = lyapunov_monitor(&t, &est()).unwrap();
        assert!(m.values.iter().all(|v| *v == 0.0));
        assert!(m.held);
    }

    #[test]
    fn monitor_flags_growth_above_level() {
        let t = trace_of(&[(0.0, 0.0, 2.0, 3.0), (10.0, 0.0, 2.0, 3.0)]);
        let m = lyapunov_monitor(&t, &est()).unwrap();
        assert!(!m.held);
        assert!(m.max > m.level);
    }

    #[test]
    fn plateau_estimates() {
        let t = trace_of(&[
            (0.1, 0.0, 0.0, 0.0),
            (0.0, 0.0, 1.0, 4.0),
            (0.0, 0.0, 3.0, 6.0),
        ]);
        let e = estimates_from_plateaus(&t, [0.1, 0.1], 20.0, 100.0, 0.14, 0.5).unwrap();
        // last ⌈1.5⌉ = 2 samples
        assert_eq!(e.k_star, [2.0, 5.0]);
        assert_relative_eq!(e.kappa, 0.05);
        assert_eq!(e.varsigma, 0.0);
    }
}
