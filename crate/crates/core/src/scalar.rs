//! Exact scalar backends.
//!
//! Two field backends implement the [`Scalar`] trait:
//!
//! * [`num::rational::BigRational`]: arbitrary-precision rationals.
//! * [`QuadExt<T>`]: a quadratic extension `T(w)` with `w*w = r` for a fixed
//!   non-square `r`. Nesting `QuadExt<QuadExt<BigRational>>` gives one more
//!   square root when a spectral coordinate needs it.
//!
//! Every recursion in the crate is generic over `Scalar`, so the same code
//! runs over plain rationals (when the lattice parameter `u` is rational) and
//! over `Q(u)` (when only `u*u` is rational).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Commutative ring with identity: the minimal interface shared by field
/// elements, polynomials, and rational functions (for matrix entries).
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}

/// Exact field arithmetic with decidable equality.
pub trait Scalar: Ring + fmt::Display + Div<Output = Self> {
    /// Embeds a rational into the field.
    fn from_rat(r: &BigRational) -> Self;

    /// Projects back to the prime field when the value lies in it.
    fn to_rat(&self) -> Option<BigRational>;

    /// Multiplicative inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;

    /// Square root inside the same field, `None` when it does not exist.
    fn try_sqrt(&self) -> Option<Self>;

    fn inv(&self) -> Self {
        self.checked_inv().expect("inverse of zero")
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rat(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Integer power, negative exponents via the inverse.
    fn pow_i(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().pow_i(-e);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            k >>= 1;
        }
        acc
    }
}

/// Shorthand for a small rational constant.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer as a rational.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for BigRational {
    fn from_rat(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_rat(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn checked_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = self.numer();
        let den = self.denom();
        let sn = num.sqrt();
        let sd = den.sqrt();
        if &(&sn * &sn) == num && &(&sd * &sd) == den {
            Some(BigRational::new(sn, sd))
        } else {
            None
        }
    }
}

/// Element `a + b*w` of a quadratic extension with `w*w = r`.
///
/// Invariant: when `b = 0` the stored `r` is normalized to zero, so equality
/// of values embedded from the base field is independent of the extension
/// they were computed in. Elements with different nonzero `r` must never meet
/// in one expression; arithmetic panics if they do.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExt<T: Scalar> {
    a: T,
    b: T,
    r: T,
}

impl<T: Scalar> QuadExt<T> {
    pub fn new(a: T, b: T, r: T) -> Self {
        Self { a, b, r }.normalized()
    }

    /// The generator `w` itself, with `w*w = r`.
    pub fn generator(r: T) -> Self {
        assert!(!r.is_zero(), "generator with w*w = 0 is not a field element");
        Self {
            a: T::zero(),
            b: T::one(),
            r,
        }
    }

    /// Embeds a base-field element.
    pub fn from_base(a: T) -> Self {
        Self {
            a,
            b: T::zero(),
            r: T::zero(),
        }
    }

    pub fn base_part(&self) -> &T {
        &self.a
    }

    pub fn ext_part(&self) -> &T {
        &self.b
    }

    pub fn ext_square(&self) -> &T {
        &self.r
    }

    /// Galois conjugate `a - b*w`.
    pub fn conj(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -self.b.clone(),
            r: self.r.clone(),
        }
    }

    /// Field norm `a*a - b*b*r`, an element of the base field.
    pub fn norm(&self) -> T {
        self.a.clone() * self.a.clone() - self.b.clone() * self.b.clone() * self.r.clone()
    }

    /// Projects to the base field; `None` when the extension part is nonzero.
    pub fn to_base(&self) -> Option<T> {
        if self.b.is_zero() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.b = T::zero();
            self.r = T::zero();
        }
        self
    }

    /// The common `r` of two operands; zero (base-field) values are neutral.
    fn join_r(&self, other: &Self) -> T {
        if self.r == other.r {
            self.r.clone()
        } else if self.r.is_zero() {
            other.r.clone()
        } else if other.r.is_zero() {
            self.r.clone()
        } else {
            panic!("mixed quadratic extensions: {} vs {}", self.r, other.r);
        }
    }
}

impl<T: Scalar> Add for QuadExt<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let r = self.join_r(&rhs);
        Self::new(self.a + rhs.a, self.b + rhs.b, r)
    }
}

impl<T: Scalar> Sub for QuadExt<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let r = self.join_r(&rhs);
        Self::new(self.a - rhs.a, self.b - rhs.b, r)
    }
}

impl<T: Scalar> Mul for QuadExt<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let r = self.join_r(&rhs);
        let a = self.a.clone() * rhs.a.clone() + self.b.clone() * rhs.b.clone() * r.clone();
        let b = self.a * rhs.b + self.b * rhs.a;
        Self::new(a, b, r)
    }
}

impl<T: Scalar> Div for QuadExt<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl<T: Scalar> Neg for QuadExt<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            r: self.r,
        }
    }
}

impl<T: Scalar> fmt::Display for QuadExt<T> {
    /// Base-field values print as the base field does; proper extension
    /// elements print as `a+b*u;u2=r`, the exchange format used by the CLI.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*u;u2={}", self.a, self.b, self.r)
        }
    }
}

impl<T: Scalar> Ring for QuadExt<T> {
    fn zero() -> Self {
        Self::from_base(T::zero())
    }

    fn one() -> Self {
        Self::from_base(T::one())
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl<T: Scalar> Scalar for QuadExt<T> {
    fn from_rat(r: &BigRational) -> Self {
        Self::from_base(T::from_rat(r))
    }

    fn to_rat(&self) -> Option<BigRational> {
        if self.b.is_zero() {
            self.a.to_rat()
        } else {
            None
        }
    }

    fn checked_inv(&self) -> Option<Self> {
        let n = self.norm();
        let ninv = n.checked_inv()?;
        Some(Self::new(
            self.a.clone() * ninv.clone(),
            -self.b.clone() * ninv,
            self.r.clone(),
        ))
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.b.is_zero() {
            // Base-embedded values know nothing about the ambient extension;
            // callers with a generator at hand use `sqrt_with_root_hint`.
            return self.a.try_sqrt().map(Self::from_base);
        }
        // (p + q*w)^2 = a + b*w needs p*p + q*q*r = a and 2*p*q = b, which
        // solves to p*p = (a +- sqrt(norm))/2, q = b/(2p).
        let s = self.norm().try_sqrt()?;
        let two = T::from_i64(2);
        for sign in [s.clone(), -s] {
            let p2 = (self.a.clone() + sign) / two.clone();
            if let Some(p) = p2.try_sqrt() {
                if p.is_zero() {
                    continue;
                }
                let q = self.b.clone() / (two.clone() * p.clone());
                let root = Self::new(p, q, self.r.clone());
                if root.clone() * root.clone() == *self {
                    return Some(root);
                }
            }
        }
        None
    }
}

/// Square root of `d` in the working field.
///
/// Falls back on factoring out the known root `u` of `u2`: when `d` has no
/// direct root but `d / u2` does, the root is `sqrt(d/u2) * u`. This covers
/// values like `d = 1/2` in `Q(u)` with `u*u = 1/8`, whose root `2u` is not
/// reachable from `d` alone after base-field normalization.
pub fn sqrt_with_root_hint<T: Scalar>(d: &T, u: &T, u2: &T) -> Option<T> {
    if let Some(s) = d.try_sqrt() {
        return Some(s);
    }
    if u2.is_zero() {
        return None;
    }
    (d.clone() / u2.clone())
        .try_sqrt()
        .map(|s| s * u.clone())
}

/// `Q(u)`: the single-level extension used throughout the gap computations.
pub type QRat = QuadExt<BigRational>;
