//! Real-linear operators on ℂ^d.
//!
//! A pair `(a1, a2)` acts as `z ↦ a1·z + a2·conj(z)`. Its realization is the
//! 2d×2d real matrix acting on `[Re z; Im z]`; read with complex scalars it is
//! the complexification, so no separate complex copy is ever stored.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm, symplectic_j, CMat, CVec, RMat, I};

#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearPair {
    pub a1: CMat,
    pub a2: CMat,
}

impl RealLinearPair {
    pub fn new(a1: CMat, a2: CMat) -> Result<Self> {
        let d = a1.nrows();
        if a1.ncols() != d || a2.nrows() != d || a2.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "pair blocks are {}x{} and {}x{}",
                a1.nrows(),
                a1.ncols(),
                a2.nrows(),
                a2.ncols()
            )));
        }
        Ok(Self { a1, a2 })
    }

    pub fn zero(d: usize) -> Self {
        Self { a1: CMat::zeros(d, d), a2: CMat::zeros(d, d) }
    }

    pub fn identity(d: usize) -> Self {
        Self { a1: CMat::identity(d, d), a2: CMat::zeros(d, d) }
    }

    /// `Jz = -iz`.
    pub fn j(d: usize) -> Self {
        Self { a1: CMat::identity(d, d) * (-I), a2: CMat::zeros(d, d) }
    }

    /// `z ↦ conj(z)`.
    pub fn conjugation(d: usize) -> Self {
        Self { a1: CMat::zeros(d, d), a2: CMat::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.a1.nrows()
    }

    pub fn apply(&self, z: &CVec) -> CVec {
        &self.a1 * z + &self.a2 * z.conjugate()
    }

    pub fn realize(&self) -> RMat {
        let d = self.dim();
        let (a1, a2) = (&self.a1, &self.a2);
        RMat::from_fn(2 * d, 2 * d, |i, j| {
            let (r, c) = (i % d, j % d);
            let (p, q) = (a1[(r, c)], a2[(r, c)]);
            match (i < d, j < d) {
                (true, true) => p.re + q.re,
                (true, false) => q.im - p.im,
                (false, true) => p.im + q.im,
                (false, false) => p.re - q.re,
            }
        })
    }

    /// Inverse of [`realize`](Self::realize).
    pub fn from_realization(r: &RMat) -> Result<Self> {
        let n = r.nrows();
        if n % 2 != 0 || r.ncols() != n {
            return Err(Error::DimensionMismatch(format!("realization is {}x{}", n, r.ncols())));
        }
        let d = n / 2;
        let a1 = CMat::from_fn(d, d, |i, j| {
            let (r11, r12, r21, r22) = (r[(i, j)], r[(i, j + d)], r[(i + d, j)], r[(i + d, j + d)]);
            Complex64::new((r11 + r22) / 2.0, (r21 - r12) / 2.0)
        });
        let a2 = CMat::from_fn(d, d, |i, j| {
            let (r11, r12, r21, r22) = (r[(i, j)], r[(i, j + d)], r[(i + d, j)], r[(i + d, j + d)]);
            Complex64::new((r11 - r22) / 2.0, (r12 + r21) / 2.0)
        });
        Ok(Self { a1, a2 })
    }

    /// The ♯-adjoint `(a1*, a2ᵀ)`, realized by `R(A)ᵀ`.
    pub fn sharp_adjoint(&self) -> Self {
        Self { a1: self.a1.adjoint(), a2: self.a2.transpose() }
    }

    /// Composition `self ∘ other` as real-linear maps.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a1: &self.a1 * &other.a1 + &self.a2 * other.a2.conjugate(),
            a2: &self.a1 * &other.a2 + &self.a2 * other.a1.conjugate(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { a1: &self.a1 + &other.a1, a2: &self.a2 + &other.a2 }
    }
}

/// The symplectic form realized as `[0, I; -I, 0]`.
pub fn symplectic_form(d: usize) -> RMat {
    symplectic_j(d)
}

/// `exp(t·R(pair))`.
pub fn pair_exp(pair: &RealLinearPair, t: f64) -> Result<RMat> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time".into()));
    }
    Ok(expm(&(pair.realize() * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{join, max_abs, split};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_pair_realizes_to_zero() {
        assert_eq!(RealLinearPair::zero(2).realize(), RMat::zeros(4, 4));
    }

    #[test]
    fn j_realization() {
        assert_eq!(RealLinearPair::j(2).realize(), symplectic_j(2));
    }

    #[test]
    fn conjugation_realization() {
        let r = RealLinearPair::conjugation(1).realize();
        assert_eq!(r, RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let z = CVec::from_vec(vec![c(0.3, -1.2)]);
        assert_eq!(join(&(&r * split(&z))), z.conjugate());
    }

    #[test]
    fn sharp_of_identity_and_j() {
        let id = RealLinearPair::identity(3);
        assert_eq!(id.sharp_adjoint(), id);
        let jt = RealLinearPair::j(2).sharp_adjoint().realize();
        assert_eq!(jt, -symplectic_j(2));
    }

    #[test]
    fn pair_exp_cases() {
        let minus = RealLinearPair::new(CMat::identity(1, 1) * c(-1.0, 0.0), CMat::zeros(1, 1)).unwrap();
        assert!(max_abs(&(pair_exp(&minus, 0.0).unwrap() - RMat::identity(2, 2))) < 1e-15);
        let e = pair_exp(&minus, 1.0).unwrap();
        assert!(max_abs(&(e - RMat::identity(2, 2) * (-1.0_f64).exp())) < 1e-15);
        let h = pair_exp(&minus, 0.5).unwrap();
        assert!(max_abs(&(h - RMat::identity(2, 2) * (-0.5_f64).exp())) < 1e-15);
        assert!(pair_exp(&minus, f64::NAN).is_err());
    }

    #[test]
    fn mismatched_blocks_rejected() {
        assert!(RealLinearPair::new(CMat::zeros(2, 2), CMat::zeros(1, 1)).is_err());
    }
}
