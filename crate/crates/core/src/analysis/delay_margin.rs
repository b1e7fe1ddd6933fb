//! Razumikhin-type bounds on the admissible input delay.
//!
//! For the closed loop written as `ξ̇ = A₁ξ + B₁ξ(t − h) + …` the quadratic
//! form stays negative while `h < λ_min(Q) / ‖G‖`, with
//!
//! ```text
//! G = η P B₁ (A₁ P⁻¹ A₁ᵀ + B₁ P⁻¹ B₁ᵀ + P⁻¹) B₁ᵀ P + 2 (r/η) P
//! ```
//!
//! The same construction with the constant-bound design's matrices
//! `Ā₁ = [[0, 1], [0, 0]]`, `B̄₁ = [[0, 0], [−K₁, −K₂]]` gives its bound.
//! `‖·‖` is the spectral norm.

use serde::Serialize;

use super::{LyapunovPair, Mat2};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBoundInputs<T> {
    pub pair: LyapunovPair<T>,
    /// Razumikhin constant r > 1.
    pub razumikhin_r: T,
    pub eta: T,
}

impl<T: Scalar> DelayBoundInputs<T> {
    pub fn new(pair: LyapunovPair<T>, razumikhin_r: T, eta: T) -> Result<Self> {
        if !(razumikhin_r > T::one()) {
            return Err(Error::invalid("razumikhin_r", "must be greater than 1"));
        }
        if !(eta > T::zero()) {
            return Err(Error::invalid("eta", "must be positive"));
        }
        Ok(Self {
            pair,
            razumikhin_r,
            eta,
        })
    }
}

/// Delayed-feedback split of the delay-compensating closed loop.
pub fn delayed_error_matrices<T: Scalar>(k: T, omega: T) -> (Mat2<T>, Mat2<T>) {
    let a1 = Mat2::new(T::zero(), T::one(), -k, -omega);
    let b1 = Mat2::new(T::zero(), T::zero(), T::zero(), -omega);
    (a1, b1)
}

/// Delayed-feedback split of the constant-bound design.
pub fn constant_bound_error_matrices<T: Scalar>(k1: T, k2: T) -> (Mat2<T>, Mat2<T>) {
    let a1 = Mat2::new(T::zero(), T::one(), T::zero(), T::zero());
    let b1 = Mat2::new(T::zero(), T::zero(), -k1, -k2);
    (a1, b1)
}

/// `G` for the given delayed-feedback split.
pub fn razumikhin_matrix<T: Scalar>(
    inputs: &DelayBoundInputs<T>,
    a1: &Mat2<T>,
    b1: &Mat2<T>,
) -> Result<Mat2<T>> {
    let p = inputs.pair.p;
    let p_inv = p.inverse("P")?;
    let inner = *a1 * p_inv * a1.transpose() + *b1 * p_inv * b1.transpose() + p_inv;
    let eta = inputs.eta;
    let g = (p * *b1 * inner * b1.transpose() * p).scale(eta)
        + p.scale(lit::<T>(2.0) * inputs.razumikhin_r / eta);
    Ok(g)
}

fn bound_from<T: Scalar>(inputs: &DelayBoundInputs<T>, g: &Mat2<T>) -> T {
    inputs.pair.q.sym_eigenvalues().0 / g.spectral_norm()
}

/// Maximum allowable delay h̄ of the delay-compensating law.
pub fn delay_bound<T: Scalar>(inputs: &DelayBoundInputs<T>) -> Result<T> {
    let (a1, b1) = delayed_error_matrices(inputs.pair.k, inputs.pair.omega);
    let g = razumikhin_matrix(inputs, &a1, &b1)?;
    Ok(bound_from(inputs, &g))
}

/// Maximum allowable delay ĥ of the constant-bound design with gains K₁, K₂.
pub fn constant_bound<T: Scalar>(inputs: &DelayBoundInputs<T>, k1: T, k2: T) -> Result<T> {
    let (a1, b1) = constant_bound_error_matrices(k1, k2);
    let g1 = razumikhin_matrix(inputs, &a1, &b1)?;
    Ok(bound_from(inputs, &g1))
}

/// Sufficient conditions on `P⁻¹ = [[P̄₁, P̄₂], [P̄₂, P̄₃]]` for h̄ > ĥ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainConditionReport<T> {
    pub p_inv: Mat2<T>,
    /// `P̄₃ > |P̄₂ K / Ω|`.
    pub first: bool,
    /// `P̄₁ + P̄₃ > |P̄₂|`.
    pub second: bool,
    /// Left minus right side of each inequality.
    pub first_margin: T,
    pub second_margin: T,
}

impl<T> GainConditionReport<T> {
    pub fn passed(&self) -> bool {
        self.first && self.second
    }
}

pub fn gain_condition_check<T: Scalar>(
    p: &Mat2<T>,
    k: T,
    omega: T,
) -> Result<GainConditionReport<T>> {
    if omega == T::zero() {
        return Err(Error::invalid("omega", "must be non-zero"));
    }
    let p_inv = p.inverse("P")?;
    let (pb1, pb2, pb3) = (p_inv.p1(), p_inv.p2(), p_inv.p3());
    let first_margin = pb3 - (pb2 * k / omega).abs();
    let second_margin = pb1 + pb3 - pb2.abs();
    Ok(GainConditionReport {
        p_inv,
        first: first_margin > T::zero(),
        second: second_margin > T::zero(),
        first_margin,
        second_margin,
    })
}

/// Everything the `delay-bound` report prints.
#[derive(Debug, Clone, Serialize)]
pub struct DelayReport<T> {
    pub inputs: DelayReportInputs<T>,
    pub p: Mat2<T>,
    pub p_inv: Mat2<T>,
    pub lyapunov_residual: T,
    pub g: Mat2<T>,
    pub g1: Mat2<T>,
    pub lambda_min_q: T,
    /// h̄ of the delay-compensating law.
    pub delay_bound: T,
    /// ĥ of the constant-bound design under K₁ = K, K₂ = 2Ω.
    pub constant_bound: T,
    pub exceeds_constant_bound: bool,
    pub gain_conditions: GainConditionReport<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DelayReportInputs<T> {
    pub k: T,
    pub omega: T,
    pub q: Mat2<T>,
    pub razumikhin_r: T,
    pub eta: T,
    pub k1: T,
    pub k2: T,
}

/// Full comparison using the gain correspondence `K₁ = K`, `K₂ = 2Ω`.
pub fn delay_report<T: Scalar>(inputs: &DelayBoundInputs<T>) -> Result<DelayReport<T>> {
    let pair = inputs.pair;
    let (k1, k2) = (pair.k, pair.omega + pair.omega);
    let (a1, b1) = delayed_error_matrices(pair.k, pair.omega);
    let g = razumikhin_matrix(inputs, &a1, &b1)?;
    let (abar, bbar) = constant_bound_error_matrices(k1, k2);
    let g1 = razumikhin_matrix(inputs, &abar, &bbar)?;
    let h_bar = bound_from(inputs, &g);
    let h_hat = bound_from(inputs, &g1);
    Ok(DelayReport {
        inputs: DelayReportInputs {
            k: pair.k,
            omega: pair.omega,
            q: pair.q,
            razumikhin_r: inputs.razumikhin_r,
            eta: inputs.eta,
            k1,
            k2,
        },
        p: pair.p,
        p_inv: pair.p.inverse("P")?,
        lyapunov_residual: pair.residual(),
        g,
        g1,
        lambda_min_q: pair.q.sym_eigenvalues().0,
        delay_bound: h_bar,
        constant_bound: h_hat,
        exceeds_constant_bound: h_bar > h_hat,
        gain_conditions: gain_condition_check(&pair.p, pair.k, pair.omega)?,
    })
}
