//! 2x2 matrices and 2-vectors over ring entries.
//!
//! Entries range over exact scalars (evaluated matrices), polynomials (the
//! polynomial part of a connection matrix), and rational functions (symbolic
//! Lax-pair factors), so the type is generic over [`Ring`].

use crate::scalar::{Ring, Scalar};
use std::ops::{Add, Mul, Neg, Sub};

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<E: Ring> {
    pub e11: E,
    pub e12: E,
    pub e21: E,
    pub e22: E,
}

/// Column 2-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vec2<E: Ring> {
    pub x: E,
    pub y: E,
}

impl<E: Ring> Mat2<E> {
    pub fn new(e11: E, e12: E, e21: E, e22: E) -> Self {
        Self { e11, e12, e21, e22 }
    }

    pub fn identity() -> Self {
        Self::new(E::one(), E::zero(), E::zero(), E::one())
    }

    pub fn zero() -> Self {
        Self::new(E::zero(), E::zero(), E::zero(), E::zero())
    }

    pub fn diag(a: E, d: E) -> Self {
        Self::new(a, E::zero(), E::zero(), d)
    }

    pub fn det(&self) -> E {
        self.e11.clone() * self.e22.clone() - self.e12.clone() * self.e21.clone()
    }

    pub fn trace(&self) -> E {
        self.e11.clone() + self.e22.clone()
    }

    pub fn transpose(&self) -> Self {
        Self::new(
            self.e11.clone(),
            self.e21.clone(),
            self.e12.clone(),
            self.e22.clone(),
        )
    }

    /// Adjugate: `self * adjugate = det * I`.
    pub fn adjugate(&self) -> Self {
        Self::new(
            self.e22.clone(),
            -self.e12.clone(),
            -self.e21.clone(),
            self.e11.clone(),
        )
    }

    pub fn scale(&self, c: &E) -> Self {
        self.map(|e| e.clone() * c.clone())
    }

    pub fn map<F: Fn(&E) -> E>(&self, f: F) -> Self {
        Self::new(f(&self.e11), f(&self.e12), f(&self.e21), f(&self.e22))
    }

    /// Maps entries into another ring (evaluation, embedding, and so on).
    pub fn map_into<F2: Ring, F: Fn(&E) -> F2>(&self, f: F) -> Mat2<F2> {
        Mat2::new(f(&self.e11), f(&self.e12), f(&self.e21), f(&self.e22))
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &Vec2<E>) -> Vec2<E> {
        Vec2 {
            x: self.e11.clone() * v.x.clone() + self.e12.clone() * v.y.clone(),
            y: self.e21.clone() * v.x.clone() + self.e22.clone() * v.y.clone(),
        }
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, v: &Vec2<E>) -> Vec2<E> {
        Vec2 {
            x: v.x.clone() * self.e11.clone() + v.y.clone() * self.e21.clone(),
            y: v.x.clone() * self.e12.clone() + v.y.clone() * self.e22.clone(),
        }
    }

    pub fn from_cols(c1: &Vec2<E>, c2: &Vec2<E>) -> Self {
        Self::new(c1.x.clone(), c2.x.clone(), c1.y.clone(), c2.y.clone())
    }
}

impl<T: Scalar> Mat2<T> {
    /// Inverse over a field; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let dinv = self.det().checked_inv()?;
        Some(self.adjugate().scale(&dinv))
    }
}

impl<E: Ring> Vec2<E> {
    pub fn new(x: E, y: E) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(E::zero(), E::zero())
    }

    pub fn dot(&self, other: &Self) -> E {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn scale(&self, c: &E) -> Self {
        Self::new(self.x.clone() * c.clone(), self.y.clone() * c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Outer product `self * other^t`.
    pub fn outer(&self, other: &Self) -> Mat2<E> {
        Mat2::new(
            self.x.clone() * other.x.clone(),
            self.x.clone() * other.y.clone(),
            self.y.clone() * other.x.clone(),
            self.y.clone() * other.y.clone(),
        )
    }
}

/// Determinant of the matrix with columns `a`, `b`.
pub fn det2<E: Ring>(a: &Vec2<E>, b: &Vec2<E>) -> E {
    a.x.clone() * b.y.clone() - a.y.clone() * b.x.clone()
}

impl<E: Ring> Add for Mat2<E> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.e11 + rhs.e11,
            self.e12 + rhs.e12,
            self.e21 + rhs.e21,
            self.e22 + rhs.e22,
        )
    }
}

impl<E: Ring> Sub for Mat2<E> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.e11 - rhs.e11,
            self.e12 - rhs.e12,
            self.e21 - rhs.e21,
            self.e22 - rhs.e22,
        )
    }
}

impl<E: Ring> Neg for Mat2<E> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.e11, -self.e12, -self.e21, -self.e22)
    }
}

impl<E: Ring> Mul for Mat2<E> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.e11.clone() * rhs.e11.clone() + self.e12.clone() * rhs.e21.clone(),
            self.e11 * rhs.e12.clone() + self.e12 * rhs.e22.clone(),
            self.e21.clone() * rhs.e11 + self.e22.clone() * rhs.e21,
            self.e21 * rhs.e12 + self.e22 * rhs.e22,
        )
    }
}

impl<E: Ring> Add for Vec2<E> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<E: Ring> Sub for Vec2<E> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<E: Ring> Neg for Vec2<E> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::scalar::rat_int;
    use num::rational::BigRational;

    type M = Mat2<BigRational>;
    type V = Vec2<BigRational>;

    fn random_mat(rng: &mut SplitMix64) -> M {
        M::new(
            rng.rational(9, 5),
            rng.rational(9, 5),
            rng.rational(9, 5),
            rng.rational(9, 5),
        )
    }

    #[test]
    fn identity_and_product() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..20 {
            let m = random_mat(&mut rng);
            assert_eq!(m.clone() * M::identity(), m);
            assert_eq!(M::identity() * m.clone(), m);
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = SplitMix64::new(12);
        for _ in 0..50 {
            let a = random_mat(&mut rng);
            let b = random_mat(&mut rng);
            assert_eq!((a.clone() * b.clone()).det(), a.det() * b.det());
        }
    }

    #[test]
    fn adjugate_identity() {
        let mut rng = SplitMix64::new(13);
        for _ in 0..20 {
            let m = random_mat(&mut rng);
            let prod = m.clone() * m.adjugate();
            assert_eq!(prod, M::identity().scale(&m.det()));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = SplitMix64::new(14);
        let mut done = 0;
        while done < 20 {
            let m = random_mat(&mut rng);
            let Some(inv) = m.inverse() else { continue };
            assert_eq!(m * inv, M::identity());
            done += 1;
        }
    }

    #[test]
    fn row_and_column_application_agree() {
        let mut rng = SplitMix64::new(15);
        for _ in 0..20 {
            let m = random_mat(&mut rng);
            let v = V::new(rng.rational(9, 5), rng.rational(9, 5));
            let w = V::new(rng.rational(9, 5), rng.rational(9, 5));
            // (v^t M) w = v^t (M w)
            assert_eq!(m.apply_left(&v).dot(&w), v.dot(&m.apply(&w)));
        }
    }

    #[test]
    fn outer_product_and_det2() {
        let v = V::new(rat_int(2), rat_int(3));
        let w = V::new(rat_int(5), rat_int(7));
        assert_eq!(det2(&v, &w), rat_int(-1));
        let m = v.outer(&w);
        assert_eq!(m.det(), rat_int(0));
        assert_eq!(m.trace(), v.dot(&w));
    }
}
