use serde::Serialize;

use crate::controllers::MAX_GAINS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sim::{Sample, Trace};

/// Root mean square of a series.
pub fn rms<T: Scalar>(series: &[T]) -> Result<T> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = T::from_usize(series.len()).expect("length fits in scalar");
    let sum = series.iter().fold(T::zero(), |acc, x| acc + *x * *x);
    Ok((sum / n).sqrt())
}

/// `100 (baseline − candidate) / baseline`.
pub fn improvement_pct<T: Scalar>(candidate: T, baseline: T) -> T {
    T::from_f64(100.0).expect("literal") * (baseline - candidate) / baseline
}

/// Summary statistics of one run. Everything here can be recomputed from
/// the trace columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub label: String,
    pub controller: String,
    pub samples: usize,
    pub rms_error_deg: f64,
    pub rms_torque: f64,
    pub gain_names: Vec<String>,
    pub gain_min: Vec<f64>,
    pub gain_max: Vec<f64>,
    pub instability: bool,
    pub gain_ceiling_hit: bool,
}

/// Streaming accumulator so long runs need not keep the whole trace.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    count: usize,
    sum_e2: f64,
    sum_tau2: f64,
    gain_min: [f64; MAX_GAINS],
    gain_max: [f64; MAX_GAINS],
}

impl Default for MetricsAccumulator {
    fn default() -> Self {
        Self {
            count: 0,
            sum_e2: 0.0,
            sum_tau2: 0.0,
            gain_min: [f64::INFINITY; MAX_GAINS],
            gain_max: [f64::NEG_INFINITY; MAX_GAINS],
        }
    }
}

impl MetricsAccumulator {
    pub fn push<T: Scalar>(&mut self, s: &Sample<T>) {
        let e = s.e.to_f64_lossy();
        let tau = s.tau_cmd.to_f64_lossy();
        self.count += 1;
        self.sum_e2 += e * e;
        self.sum_tau2 += tau * tau;
        for (i, g) in s.gains.iter().enumerate() {
            let g = g.to_f64_lossy();
            self.gain_min[i] = self.gain_min[i].min(g);
            self.gain_max[i] = self.gain_max[i].max(g);
        }
    }

    pub fn finish(&self, meta: &crate::sim::TraceMeta, instability: bool) -> Result<Metrics> {
        if self.count == 0 {
            return Err(Error::EmptySeries);
        }
        let n = self.count as f64;
        let k = meta.gain_names.len();
        Ok(Metrics {
            label: meta.label.clone(),
            controller: meta.controller.clone(),
            samples: self.count,
            rms_error_deg: (self.sum_e2 / n).sqrt().to_degrees(),
            rms_torque: (self.sum_tau2 / n).sqrt(),
            gain_names: meta.gain_names.clone(),
            gain_min: self.gain_min[..k].to_vec(),
            gain_max: self.gain_max[..k].to_vec(),
            instability,
            gain_ceiling_hit: meta.gain_ceiling_hit,
        })
    }
}

impl Metrics {
    pub fn from_trace<T: Scalar>(trace: &Trace<T>, instability: bool) -> Result<Self> {
        let mut acc = MetricsAccumulator::default();
        for s in &trace.samples {
            acc.push(s);
        }
        acc.finish(&trace.meta, instability)
    }
}

/// Improvements of one run over a baseline, in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Improvement {
    pub error_pct: f64,
    pub torque_pct: f64,
}

impl Improvement {
    pub fn of(candidate: &Metrics, baseline: &Metrics) -> Self {
        Self {
            error_pct: improvement_pct(candidate.rms_error_deg, baseline.rms_error_deg),
            torque_pct: improvement_pct(candidate.rms_torque, baseline.rms_torque),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_series() {
        assert_eq!(rms(&[-3.0; 7]).unwrap(), 3.0);
    }

    #[test]
    fn empty_series_errors() {
        assert_eq!(rms::<f64>(&[]), Err(Error::EmptySeries));
    }

    #[test]
    fn table_percentage() {
        let pct = improvement_pct(0.517, 0.785);
        assert_relative_eq!(pct, 34.14, epsilon = 5e-3);
    }

    #[test]
    fn sinusoid_rms() {
        let a = 1.7;
        let n = 10_000;
        // whole periods, uniform samples without the duplicated endpoint
        let s: Vec<f64> = (0..n)
            .map(|k| a * (2.0 * std::f64::consts::PI * 3.0 * k as f64 / n as f64).sin())
            .collect();
        assert_relative_eq!(rms(&s).unwrap(), a / 2f64.sqrt(), epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn sign_flip_and_self_improvement(v in prop::collection::vec(-100.0f64..100.0, 1..50), x in 0.01f64..10.0) {
            let neg: Vec<f64> = v.iter().map(|a| -a).collect();
            prop_assert_eq!(rms(&v).unwrap(), rms(&neg).unwrap());
            prop_assert_eq!(improvement_pct(x, x), 0.0);
        }
    }
}
