//! JSON scenario files.
//!
//! A file lists one or more controller variants that share plant,
//! reference, delay and horizon. `simulate` needs exactly one variant,
//! `compare` at least two. Omitted sections take their defaults.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controllers::ControllerConfig;
use crate::error::{Error, Result};
use crate::plant::{NominalModel, PlantParams};
use crate::scalar::{lit, Scalar};
use crate::sim::{DelayProfile, Reference, Scenario, TraceFormat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct InitialConditions<T> {
    pub theta: T,
    pub theta_dot: T,
}

impl<T: Scalar> Default for InitialConditions<T> {
    fn default() -> Self {
        Self {
            theta: lit(0.1),
            theta_dot: T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct Variant<T> {
    pub label: String,
    pub controller: ControllerConfig<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    /// Keep every N-th trace row in the written file.
    pub every: usize,
    pub format: TraceFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            every: 1,
            format: TraceFormat::Csv,
        }
    }
}

fn default_dt<T: Scalar>() -> T {
    lit(1e-4)
}

fn default_duration<T: Scalar>() -> T {
    lit(100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct ScenarioConfig<T> {
    #[serde(default)]
    pub plant: PlantParams<T>,
    /// Defaults to `J_hat = 1.5 J`, `B_hat = B`.
    #[serde(default)]
    pub nominal: Option<NominalModel<T>>,
    pub controllers: Vec<Variant<T>>,
    /// Label of the variant others are compared against; the first one if absent.
    #[serde(default)]
    pub baseline: Option<String>,
    #[serde(default)]
    pub reference: Reference<T>,
    #[serde(default)]
    pub delay: DelayProfile<T>,
    #[serde(default = "default_dt")]
    pub dt: T,
    #[serde(default = "default_duration")]
    pub duration: T,
    #[serde(default)]
    pub initial: InitialConditions<T>,
    /// Seed for plant jitter; unused while `jitter` is zero.
    #[serde(default)]
    pub seed: u64,
    /// Relative spread applied to every plant parameter.
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plant after applying the seeded jitter.
    pub fn effective_plant(&self) -> PlantParams<T> {
        if self.jitter == 0.0 {
            return self.plant;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.plant.jittered(&mut rng, self.jitter)
    }

    fn check_shared(&self) -> Result<()> {
        if !(self.jitter.is_finite() && (0.0..1.0).contains(&self.jitter)) {
            return Err(Error::invalid("jitter", "must lie in [0, 1)"));
        }
        if self.output.every == 0 {
            return Err(Error::invalid("output.every", "must be at least 1"));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &self.controllers {
            // labels name the output files
            let safe = |c: char| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.');
            if v.label.is_empty() || v.label.starts_with('.') || !v.label.chars().all(safe) {
                return Err(Error::invalid(
                    "controllers",
                    format!(
                        "label `{}` must be non-empty ASCII letters, digits, `_`, `-` or `.`",
                        v.label
                    ),
                ));
            }
            if !seen.insert(v.label.as_str()) {
                return Err(Error::invalid(
                    "controllers",
                    format!("duplicate label `{}`", v.label),
                ));
            }
        }
        Ok(())
    }

    /// The single scenario of a `simulate` file.
    pub fn single(&self) -> Result<Scenario<T>> {
        self.check_shared()?;
        if self.controllers.len() != 1 {
            return Err(Error::invalid(
                "controllers",
                format!(
                    "must select exactly one controller, found {}",
                    self.controllers.len()
                ),
            ));
        }
        self.scenario(&self.controllers[0])
    }

    /// All scenarios of a `compare` file and the index of the baseline.
    pub fn comparison(&self) -> Result<(Vec<Scenario<T>>, usize)> {
        self.check_shared()?;
        if self.controllers.len() < 2 {
            return Err(Error::invalid(
                "controllers",
                format!(
                    "must list at least two variants to compare, found {}",
                    self.controllers.len()
                ),
            ));
        }
        let baseline = match &self.baseline {
            None => 0,
            Some(b) => self
                .controllers
                .iter()
                .position(|v| &v.label == b)
                .ok_or_else(|| {
                    Error::invalid("baseline", format!("`{b}` is not a variant label"))
                })?,
        };
        let scenarios = self
            .controllers
            .iter()
            .map(|v| self.scenario(v))
            .collect::<Result<Vec<_>>>()?;
        Ok((scenarios, baseline))
    }

    fn scenario(&self, v: &Variant<T>) -> Result<Scenario<T>> {
        let plant = self.effective_plant();
        let sc = Scenario {
            label: v.label.clone(),
            nominal: self
                .nominal
                .unwrap_or_else(|| NominalModel::default_for(&plant)),
            plant,
            controller: v.controller.clone(),
            reference: self.reference,
            delay: self.delay,
            dt: self.dt,
            duration: self.duration,
            theta0: self.initial.theta,
            theta_dot0: self.initial.theta_dot,
        };
        sc.validate()?;
        Ok(sc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_uses_defaults() {
        let cfg = ScenarioConfig::<f64>::from_json(
            r#"{"controllers": [{"label": "p", "controller": {"kind": "proposed"}}]}"#,
        )
        .unwrap();
        let sc = cfg.single().unwrap();
        assert_eq!(sc.dt, 1e-4);
        assert_eq!(sc.duration, 100.0);
        assert_eq!(sc.theta0, 0.1);
        assert_eq!(sc.plant, PlantParams::default());
        assert_eq!(sc.reference, Reference::default());
    }

    #[test]
    fn unknown_field_rejected() {
        let err = ScenarioConfig::<f64>::from_json(r#"{"controllers": [], "dtt": 1}"#).unwrap_err();
        assert!(err.to_string().contains("dtt"));
    }

    #[test]
    fn zero_dt_rejected() {
        let cfg = ScenarioConfig::<f64>::from_json(
            r#"{"dt": 0, "controllers": [{"label": "a", "controller": {"kind": "asmc"}}]}"#,
        )
        .unwrap();
        let err = cfg.single().unwrap_err();
        assert!(err.to_string().contains("dt must be positive"), "{err}");
    }

    #[test]
    fn variant_counts() {
        let one = r#"{"controllers": [{"label": "a", "controller": {"kind": "asmc"}}]}"#;
        assert!(ScenarioConfig::<f64>::from_json(one)
            .unwrap()
            .comparison()
            .is_err());
        let two = r#"{"controllers": [{"label": "a", "controller": {"kind": "asmc"}},
                                      {"label": "b", "controller": {"kind": "proposed", "lambda": 50}}],
                      "baseline": "b"}"#;
        let cfg = ScenarioConfig::<f64>::from_json(two).unwrap();
        assert!(cfg.single().is_err());
        let (scs, base) = cfg.comparison().unwrap();
        assert_eq!((scs.len(), base), (2, 1));
    }

    #[test]
    fn jitter_is_seeded() {
        let text = r#"{"seed": 9, "jitter": 0.5, "controllers": [{"label": "a", "controller": {"kind": "asmc"}}]}"#;
        let a = ScenarioConfig::<f64>::from_json(text)
            .unwrap()
            .effective_plant();
        let b = ScenarioConfig::<f64>::from_json(text)
            .unwrap()
            .effective_plant();
        assert_eq!(a, b);
        assert_ne!(a, PlantParams::default());
    }
}
