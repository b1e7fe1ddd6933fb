use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Time-varying input delay `h(t) = d_A |sin(d_ω t)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct DelayProfile<T> {
    pub amplitude: T,
    pub frequency: T,
}

impl<T: Scalar> DelayProfile<T> {
    pub fn none() -> Self {
        Self {
            amplitude: T::zero(),
            frequency: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= T::zero()) {
            return Err(Error::invalid(
                "delay.amplitude",
                "must be finite and non-negative",
            ));
        }
        if !self.frequency.is_finite() {
            return Err(Error::invalid("delay.frequency", "must be finite"));
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, t: T) -> T {
        self.amplitude * (self.frequency * t).sin().abs()
    }

    /// Largest delay the profile can produce.
    pub fn max_delay(&self) -> T {
        self.amplitude
    }
}

/// Uniformly sampled torque history with linearly interpolated lookup.
///
/// Sample `k` is stamped `k·dt`; timestamps are derived from the index so
/// they never accumulate rounding error. Queries before `t = 0` return the
/// pre-start value.
#[derive(Debug, Clone)]
pub struct DelayLine<T> {
    dt: T,
    /// Index of the oldest retained sample.
    first: usize,
    values: VecDeque<T>,
    capacity: usize,
    pre_start: T,
}

impl<T: Scalar> DelayLine<T> {
    /// `max_delay` bounds how far back queries may reach.
    pub fn new(dt: T, max_delay: T, pre_start: T) -> Result<Self> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        if !(max_delay >= T::zero() && max_delay.is_finite()) {
            return Err(Error::invalid(
                "max_delay",
                "must be finite and non-negative",
            ));
        }
        let span = (max_delay / dt).ceil().to_usize().unwrap_or(0);
        let capacity = span + 3;
        Ok(Self {
            dt,
            first: 0,
            values: VecDeque::with_capacity(capacity),
            capacity,
            pre_start,
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index of the newest sample, if any.
    fn newest_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.first + self.values.len() - 1)
    }

    pub fn newest_time(&self) -> Option<T> {
        self.newest_index().map(|k| self.time_of(k))
    }

    #[inline]
    fn time_of(&self, k: usize) -> T {
        T::from_usize(k).expect("index fits in scalar") * self.dt
    }

    /// Appends the sample for the next grid point.
    pub fn push(&mut self, tau: T) {
        if self.values.len() == self.capacity {
            self.values.pop_front();
            self.first += 1;
        }
        self.values.push_back(tau);
    }

    fn at_index(&self, k: usize) -> T {
        if k < self.first {
            // older than retained history: hold the oldest value
            self.values[0]
        } else {
            self.values[k - self.first]
        }
    }

    /// Torque at `t_query`, linearly interpolated between grid points.
    pub fn sample(&self, t_query: T) -> Result<T> {
        let Some(newest) = self.newest_index() else {
            return if t_query < T::zero() {
                Ok(self.pre_start)
            } else {
                Err(Error::Causality {
                    query: t_query.to_f64_lossy(),
                    newest: f64::NEG_INFINITY,
                })
            };
        };
        if t_query < T::zero() {
            return Ok(self.pre_start);
        }
        let pos = t_query / self.dt;
        let nearest = pos.round();
        // snap queries that land on a grid point up to rounding; k·dt/dt is
        // off by a few ulps, which in single precision exceeds 1e-9
        let snap = lit::<T>(1e-9).max(T::epsilon() * lit(64.0)) * T::one().max(nearest);
        let newest_t = T::from_usize(newest).expect("index fits in scalar");
        if (pos - nearest).abs() <= snap {
            let k = nearest.to_usize().unwrap_or(usize::MAX);
            if k > newest {
                return Err(self.causality(t_query, newest));
            }
            return Ok(self.at_index(k));
        }
        if pos > newest_t {
            return Err(self.causality(t_query, newest));
        }
        let lower = pos.floor();
        let frac = pos - lower;
        let k = lower.to_usize().unwrap_or(0);
        let (a, b) = (self.at_index(k), self.at_index(k + 1));
        Ok(a + (b - a) * frac)
    }

    fn causality(&self, t_query: T, newest: usize) -> Error {
        Error::Causality {
            query: t_query.to_f64_lossy(),
            newest: self.time_of(newest).to_f64_lossy(),
        }
    }
}

/// Free-function form of [`DelayLine::sample`].
pub fn delay_sample<T: Scalar>(d: &DelayLine<T>, t_query: T) -> Result<T> {
    d.sample(t_query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_delay_returns_latest_exactly() {
        let dt = 1e-4;
        let mut d = DelayLine::new(dt, 0.0, 0.0).unwrap();
        for k in 0..10_000usize {
            let tau = (k as f64 * 0.37).sin() * 13.1;
            d.push(tau);
            let t = k as f64 * dt;
            assert_eq!(d.sample(t).unwrap().to_bits(), tau.to_bits());
        }
    }

    #[test]
    fn constant_history() {
        let mut d = DelayLine::new(0.01, 0.1, 2.5).unwrap();
        for _ in 0..100 {
            d.push(2.5);
        }
        for q in [0.0, 0.123, 0.5, 0.99] {
            assert_eq!(d.sample(q).unwrap(), 2.5);
        }
    }

    #[test]
    fn linear_ramp_is_interpolated_exactly() {
        let dt = 1e-4;
        let mut d = DelayLine::new(dt, 0.02, 0.0).unwrap();
        let n = 5_000usize;
        for k in 0..=n {
            d.push(k as f64 * dt);
        }
        let t = n as f64 * dt;
        assert_relative_eq!(d.sample(t - 0.015).unwrap(), t - 0.015, epsilon = 1e-12);
        assert_relative_eq!(
            d.sample(t - 0.01234567).unwrap(),
            t - 0.01234567,
            epsilon = 1e-12
        );
    }

    #[test]
    fn before_start_uses_pre_start() {
        let mut d = DelayLine::new(1e-3, 0.02, -1.5).unwrap();
        d.push(4.0);
        assert_eq!(d.sample(-0.005).unwrap(), -1.5);
        assert_eq!(d.sample(0.0).unwrap(), 4.0);
    }

    #[test]
    fn future_query_is_causality_breach() {
        let mut d = DelayLine::new(1e-3, 0.02, 0.0).unwrap();
        d.push(1.0);
        d.push(2.0);
        assert!(matches!(d.sample(0.0015), Err(Error::Causality { .. })));
        assert!(matches!(d.sample(0.002), Err(Error::Causality { .. })));
        assert!(d.sample(0.001).is_ok());
    }

    #[test]
    fn ring_keeps_required_window() {
        let dt = 1e-3;
        let mut d = DelayLine::new(dt, 0.02, 0.0).unwrap();
        for k in 0..1_000usize {
            d.push(k as f64);
        }
        assert!(d.len() <= 23);
        let newest = 999.0 * dt;
        assert_relative_eq!(d.sample(newest - 0.02).unwrap(), 979.0, epsilon = 1e-9);
    }

    #[test]
    fn profile_bounds() {
        let p = DelayProfile {
            amplitude: 0.02,
            frequency: 0.01,
        };
        for k in 0..1000 {
            let h = p.at(k as f64 * 1.7);
            assert!((0.0..=0.02).contains(&h));
        }
        assert_eq!(DelayProfile::<f64>::none().at(3.0), 0.0);
    }

    proptest! {
        #[test]
        fn interpolation_stays_between_neighbours(vals in prop::collection::vec(-10.0f64..10.0, 30), q in 0.0f64..0.029) {
            let dt = 1e-3;
            let mut d = DelayLine::new(dt, 0.05, 0.0).unwrap();
            for v in &vals { d.push(*v); }
            let out = d.sample(q).unwrap();
            let k = (q / dt).floor() as usize;
            let (lo, hi) = (vals[k].min(vals[k + 1]), vals[k].max(vals[k + 1]));
            prop_assert!(out >= lo - 1e-12 && out <= hi + 1e-12);
        }
    }
}
