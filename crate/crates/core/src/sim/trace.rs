use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::controllers::MAX_GAINS;
use crate::scalar::Scalar;

/// One row of a simulation trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample<T> {
    pub t: T,
    pub theta: T,
    pub theta_dot: T,
    pub theta_d: T,
    pub e: T,
    pub e_dot: T,
    pub tau_cmd: T,
    pub tau_applied: T,
    /// Only the first `TraceMeta::gain_names.len()` entries are meaningful.
    pub gains: [T; MAX_GAINS],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub label: String,
    pub controller: String,
    pub gain_names: Vec<String>,
    pub dt: f64,
    pub duration: f64,
    pub delay_amplitude: f64,
    /// Set if any adaptive gain was clamped at the ceiling.
    pub gain_ceiling_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace<T> {
    pub meta: TraceMeta,
    pub samples: Vec<Sample<T>>,
}

/// Output encoding for traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

/// `x` with 9 significant digits.
pub fn fmt_sig<T: Scalar>(x: T) -> String {
    let v = x.to_f64_lossy();
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{:.8e}", v)
}

impl<T: Scalar> Trace<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_gains(&self) -> usize {
        self.meta.gain_names.len()
    }

    pub fn column(&self, f: impl Fn(&Sample<T>) -> T) -> Vec<T> {
        self.samples.iter().map(f).collect()
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec![
            "t",
            "theta",
            "theta_dot",
            "theta_d",
            "e",
            "e_dot",
            "tau_cmd",
            "tau_applied",
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        cols.extend((0..self.n_gains()).map(|i| format!("gain_{i}")));
        cols.join(",")
    }

    /// Writes every `every`-th sample (the last sample is always included).
    pub fn write_csv<W: Write>(&self, mut w: W, every: usize) -> io::Result<()> {
        let every = every.max(1);
        writeln!(w, "{}", self.csv_header())?;
        let last = self.samples.len().saturating_sub(1);
        for (k, s) in self.samples.iter().enumerate() {
            if k % every != 0 && k != last {
                continue;
            }
            let mut row = [
                s.t,
                s.theta,
                s.theta_dot,
                s.theta_d,
                s.e,
                s.e_dot,
                s.tau_cmd,
                s.tau_applied,
            ]
            .iter()
            .map(|v| fmt_sig(*v))
            .collect::<Vec<_>>();
            row.extend(s.gains[..self.n_gains()].iter().map(|v| fmt_sig(*v)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// JSON object with `meta` and column arrays, downsampled like the CSV.
    pub fn write_json<W: Write>(&self, w: W, every: usize) -> io::Result<()> {
        let every = every.max(1);
        let last = self.samples.len().saturating_sub(1);
        let kept: Vec<&Sample<T>> = self
            .samples
            .iter()
            .enumerate()
            .filter(|(k, _)| k % every == 0 || *k == last)
            .map(|(_, s)| s)
            .collect();
        let col = |f: &dyn Fn(&Sample<T>) -> T| {
            kept.iter().map(|s| f(s).to_f64_lossy()).collect::<Vec<_>>()
        };
        let gains: Vec<Vec<f64>> = (0..self.n_gains()).map(|i| col(&|s| s.gains[i])).collect();
        let doc = serde_json::json!({
            "meta": self.meta,
            "t": col(&|s| s.t),
            "theta": col(&|s| s.theta),
            "theta_dot": col(&|s| s.theta_dot),
            "theta_d": col(&|s| s.theta_d),
            "e": col(&|s| s.e),
            "e_dot": col(&|s| s.e_dot),
            "tau_cmd": col(&|s| s.tau_cmd),
            "tau_applied": col(&|s| s.tau_applied),
            "gains": gains,
        });
        serde_json::to_writer(w, &doc).map_err(io::Error::other)
    }

    pub fn write<W: Write>(&self, w: W, every: usize, format: TraceFormat) -> io::Result<()> {
        match format {
            TraceFormat::Csv => self.write_csv(w, every),
            TraceFormat::Json => self.write_json(w, every),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Trace<f64> {
        let samples = (0..5)
            .map(|k| Sample {
                t: k as f64 * 0.1,
                theta: 1.0 / 3.0,
                theta_dot: 0.0,
                theta_d: 0.0,
                e: 0.0,
                e_dot: 0.0,
                tau_cmd: -2.5,
                tau_applied: 0.0,
                gains: [1.0, 2.0, 0.0, 0.0, 0.0],
            })
            .collect();
        Trace {
            meta: TraceMeta {
                label: "x".into(),
                controller: "proposed".into(),
                gain_names: vec!["k_hat_0".into(), "k_hat_1".into()],
                dt: 0.1,
                duration: 0.4,
                delay_amplitude: 0.0,
                gain_ceiling_hit: false,
            },
            samples,
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(1.0f64 / 3.0), "3.33333333e-1");
        assert_eq!(fmt_sig(-2.5f64), "-2.50000000e0");
        assert_eq!(fmt_sig(0.0f64), "0");
        let back: f64 = fmt_sig(std::f64::consts::PI).parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn csv_shape_and_downsampling() {
        let mut out = Vec::new();
        tiny().write_csv(&mut out, 1).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "t,theta,theta_dot,theta_d,e,e_dot,tau_cmd,tau_applied,gain_0,gain_1"
        );
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1].split(',').count(), 10);

        let mut out = Vec::new();
        tiny().write_csv(&mut out, 3).unwrap();
        // rows 0, 3 and the final row 4
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 4);
    }

    #[test]
    fn json_has_columns() {
        let mut out = Vec::new();
        tiny().write_json(&mut out, 2).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["t"].as_array().unwrap().len(), 3);
        assert_eq!(v["gains"].as_array().unwrap().len(), 2);
        assert_eq!(v["meta"]["controller"], "proposed");
    }
}
