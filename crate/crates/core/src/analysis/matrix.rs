use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Dense 2×2 matrix, row-major. Serializes as `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[i][j]
    }

    /// Block entries of a symmetric `[[P₁, P₂], [P₂, P₃]]`.
    pub fn p1(&self) -> T {
        self.0[0][0]
    }
    pub fn p2(&self) -> T {
        self.0[0][1]
    }
    pub fn p3(&self) -> T {
        self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, c: T) -> Self {
        let m = self.0;
        Self::new(c * m[0][0], c * m[0][1], c * m[1][0], c * m[1][1])
    }

    pub fn inverse(&self, name: &'static str) -> Result<Self> {
        let d = self.det();
        let norm = self.frobenius_norm();
        if !d.is_finite() || d.abs() <= T::epsilon() * norm * norm {
            return Err(Error::Singular { name });
        }
        let m = self.0;
        Ok(Self::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(T::one() / d))
    }

    pub fn frobenius_norm(&self) -> T {
        let m = self.0;
        (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (self.0[0][1] - self.0[1][0]).abs() <= tol * (T::one() + self.frobenius_norm())
    }

    /// Symmetric part `(M + Mᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        (*self + self.transpose()).scale(lit(0.5))
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn sym_eigenvalues(&self) -> (T, T) {
        let s = self.symmetrized();
        let half_tr = s.trace() * lit(0.5);
        let half_gap = (s.0[0][0] - s.0[1][1]) * lit(0.5);
        let radius = half_gap.hypot(s.0[0][1]);
        (half_tr - radius, half_tr + radius)
    }

    /// Eigenvalues of a general matrix as `(re, im)` pairs.
    pub fn eigenvalues(&self) -> [(T, T); 2] {
        let half_tr = self.trace() * lit(0.5);
        let disc = half_tr * half_tr - self.det();
        if disc >= T::zero() {
            let root = disc.sqrt();
            [(half_tr - root, T::zero()), (half_tr + root, T::zero())]
        } else {
            let root = (-disc).sqrt();
            [(half_tr, -root), (half_tr, root)]
        }
    }

    /// Both eigenvalues strictly in the open left half-plane.
    pub fn is_hurwitz(&self) -> bool {
        self.trace() < T::zero() && self.det() > T::zero()
    }

    /// Symmetric (to `tol`) with positive leading minors.
    pub fn is_spd(&self, tol: T) -> bool {
        self.is_symmetric(tol) && self.0[0][0] > T::zero() && self.symmetrized().det() > T::zero()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        let gram = self.transpose() * *self;
        gram.sym_eigenvalues().1.max(T::zero()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub(crate) fn eigen_f64(&self) -> [(f64, f64); 2] {
        self.eigenvalues()
            .map(|(re, im)| (re.to_f64_lossy(), im.to_f64_lossy()))
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
