use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Sinusoidal steering command `θᵈ = A sin(ωt + φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct Reference<T> {
    pub amplitude: T,
    pub frequency: T,
    #[serde(default)]
    pub phase: T,
}

impl<T: Scalar> Default for Reference<T> {
    fn default() -> Self {
        Self {
            amplitude: lit(0.5),
            frequency: lit(0.5),
            phase: T::zero(),
        }
    }
}

/// Desired angle, rate and acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample<T> {
    pub theta: T,
    pub theta_dot: T,
    pub theta_ddot: T,
}

impl<T: Scalar> Reference<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.frequency.is_finite() && self.phase.is_finite()) {
            return Err(Error::invalid(
                "reference",
                "amplitude, frequency and phase must be finite",
            ));
        }
        Ok(())
    }

    pub fn eval(&self, t: T) -> ReferenceSample<T> {
        let arg = self.frequency * t + self.phase;
        let (sin, cos) = arg.sin_cos();
        let a = self.amplitude;
        let w = self.frequency;
        ReferenceSample {
            theta: a * sin,
            theta_dot: a * w * cos,
            theta_ddot: -a * w * w * sin,
        }
    }
}

/// Free-function form of [`Reference::eval`].
pub fn reference_eval<T: Scalar>(r: &Reference<T>, t: T) -> (T, T, T) {
    let s = r.eval(t);
    (s.theta, s.theta_dot, s.theta_ddot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn unit_sine_at_origin() {
        let r = Reference {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        };
        assert_eq!(reference_eval(&r, 0.0), (0.0, 1.0, 0.0));
    }

    #[test]
    fn unit_sine_at_quarter_period() {
        let r = Reference {
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        };
        let (th, thd, thdd) = reference_eval(&r, FRAC_PI_2);
        assert_relative_eq!(th, 1.0);
        assert!(thd.abs() < 1e-15);
        assert_relative_eq!(thdd, -1.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let r = Reference {
            amplitude: 0.7f64,
            frequency: 2.3,
            phase: 0.4,
        };
        for &t in &[0.0, 0.3, 1.7, 5.0] {
            let mut errs = Vec::new();
            for &h in &[1e-3, 5e-4] {
                let fd = (r.eval(t + h).theta - r.eval(t - h).theta) / (2.0 * h);
                let fdd = (r.eval(t + h).theta_dot - r.eval(t - h).theta_dot) / (2.0 * h);
                errs.push((
                    (fd - r.eval(t).theta_dot).abs(),
                    (fdd - r.eval(t).theta_ddot).abs(),
                ));
            }
            assert!(errs[0].0 < 1e-5 && errs[0].1 < 1e-5);
            // O(h²): halving h quarters the error
            if errs[0].0 > 1e-10 {
                let ratio = errs[0].0 / errs[1].0;
                assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
            }
        }
    }
}
