use serde::{Deserialize, Serialize};

use super::{sat, sgn};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Adaptive sliding-mode baseline `τ = -K sat(r)` whose gain assumes a
/// constant uncertainty bound. The sliding variable is the same filtered
/// error `r = ė + λe` used by the proposed law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar"))]
pub struct AsmcParams<T> {
    pub lambda: T,
    /// Adaptation rate scale K̄.
    pub k_bar: T,
    /// Gain floor μ.
    pub mu: T,
    pub epsilon: T,
    pub k_init: T,
}

impl<T: Scalar> Default for AsmcParams<T> {
    fn default() -> Self {
        Self {
            lambda: lit(100.0),
            k_bar: lit(1.0),
            mu: lit(0.01),
            epsilon: lit(0.1),
            k_init: lit(0.001),
        }
    }
}

impl<T: Scalar> AsmcParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("k_bar", self.k_bar),
            ("mu", self.mu),
            ("epsilon", self.epsilon),
            ("k_init", self.k_init),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsmcGain<T> {
    pub k: T,
}

impl<T: Scalar> AsmcGain<T> {
    pub fn initial(p: &AsmcParams<T>) -> Self {
        Self { k: p.k_init }
    }
}

pub fn asmc_control<T: Scalar>(r: T, k: T, epsilon: T) -> T {
    -k * sat(r, epsilon)
}

/// `K̄|r| sgn(|r| - ε)` while `K ≥ μ`, otherwise `μ`.
pub fn asmc_gain_rate<T: Scalar>(r: T, k: T, k_bar: T, mu: T, epsilon: T) -> T {
    if k >= mu {
        k_bar * r.abs() * sgn(r.abs() - epsilon)
    } else {
        mu
    }
}
