use serde::Serialize;

use super::Mat2;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Absolute residual accepted for `‖AᵀP + PA + Q‖_F`, scaled by `1 + ‖Q‖_F`.
pub fn residual_tolerance<T: Scalar>() -> T {
    lit::<T>(1e-10).max(T::epsilon() * lit(1e3))
}

/// Closed-loop matrix `[[0, 1], [−K, −2Ω]]`.
pub fn closed_loop_matrix<T: Scalar>(k: T, omega: T) -> Mat2<T> {
    Mat2::new(T::zero(), T::one(), -k, -(omega + omega))
}

/// `‖AᵀP + PA + Q‖_F`.
pub fn lyapunov_residual<T: Scalar>(a: &Mat2<T>, p: &Mat2<T>, q: &Mat2<T>) -> T {
    (a.transpose() * *p + *p * *a + *q).frobenius_norm()
}

/// Solves `AᵀP + PA = −Q` for symmetric `P`.
///
/// With `P = [[p₁, p₂], [p₂, p₃]]` the equation reduces to three linear
/// equations in `(p₁, p₂, p₃)`, solved here by Cramer's rule. The system is
/// non-singular whenever no two eigenvalues of `A` sum to zero, which a
/// Hurwitz `A` guarantees.
pub fn solve_lyapunov<T: Scalar>(a: &Mat2<T>, q: &Mat2<T>) -> Result<Mat2<T>> {
    if !a.is_finite() || !a.is_hurwitz() {
        return Err(Error::NotHurwitz {
            eigenvalues: a.eigen_f64(),
        });
    }
    if !q.is_finite() || !q.is_spd(lit(1e-12)) {
        return Err(Error::NotPositiveDefinite { name: "Q" });
    }
    let q = q.symmetrized();
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let two = lit::<T>(2.0);
    let m = [
        [two * a11, two * a21, T::zero()],
        [a12, a11 + a22, a21],
        [T::zero(), two * a12, two * a22],
    ];
    let rhs = [-q.get(0, 0), -q.get(0, 1), -q.get(1, 1)];
    let det3 = |m: &[[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    if d == T::zero() || !d.is_finite() {
        return Err(Error::Singular {
            name: "Lyapunov system",
        });
    }
    let column = |j: usize| {
        let mut mj = m;
        for (row, &b) in mj.iter_mut().zip(rhs.iter()) {
            row[j] = b;
        }
        det3(&mj) / d
    };
    let (p1, p2, p3) = (column(0), column(1), column(2));
    let p = Mat2::new(p1, p2, p2, p3);
    let tol = residual_tolerance::<T>() * (T::one() + q.frobenius_norm());
    if !(lyapunov_residual(a, &p, &q) < tol) {
        return Err(Error::Singular {
            name: "Lyapunov system (residual above tolerance)",
        });
    }
    if !p.is_spd(lit(1e-12)) {
        return Err(Error::NotPositiveDefinite { name: "P" });
    }
    Ok(p)
}

/// P and Q tied to the gains K and Ω of the switching surface `s = P₃ė + P₂e`.
///
/// Valid only when `P₁, P₂, P₃ > 0` and `P₂ / P₃ = Ω`, so that the
/// switching surface matches `ė + Ωe`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovPair<T> {
    pub p: Mat2<T>,
    pub q: Mat2<T>,
    pub k: T,
    pub omega: T,
}

impl<T: Scalar> LyapunovPair<T> {
    pub fn new(k: T, omega: T, q: Mat2<T>) -> Result<Self> {
        let a = closed_loop_matrix(k, omega);
        let p = solve_lyapunov(&a, &q)?;
        if !(p.p1() > T::zero() && p.p2() > T::zero() && p.p3() > T::zero()) {
            return Err(Error::InconsistentLyapunovPair {
                reason: format!(
                    "P entries must be positive, got P1 = {}, P2 = {}, P3 = {}",
                    p.p1(),
                    p.p2(),
                    p.p3()
                ),
            });
        }
        let ratio = p.p2() / p.p3();
        let tol = lit::<T>(1e-9).max(T::epsilon() * lit(1e4)) * T::one().max(omega.abs());
        if (ratio - omega).abs() > tol {
            return Err(Error::InconsistentLyapunovPair {
                reason: format!("P2 / P3 = {ratio} differs from Omega = {omega}"),
            });
        }
        Ok(Self { p, q, k, omega })
    }

    pub fn a(&self) -> Mat2<T> {
        closed_loop_matrix(self.k, self.omega)
    }

    pub fn residual(&self) -> T {
        lyapunov_residual(&self.a(), &self.p, &self.q)
    }
}
