//! Dense univariate polynomials and rational functions over a [`Scalar`]
//! field.
//!
//! Everything in the connection-matrix recursions is a rational function of
//! the spectral variable with degree at most eight, so a dense representation
//! with exact coefficients is both simple and fast. Rational functions are
//! stored reduced (coprime numerator and denominator, monic denominator),
//! which makes pole orders and residues well defined.

use crate::error::{CoreError, Result};
use crate::scalar::{Ring, Scalar};
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial with ascending coefficients; the empty vector is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Builds from ascending coefficients, trimming leading zeros.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// The monomial `c * z^deg`.
    pub fn monomial(c: T, deg: usize) -> Self {
        let mut coeffs = vec![T::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    /// The variable `z`.
    pub fn var() -> Self {
        Self::monomial(T::one(), 1)
    }

    /// The linear factor `z - z0`.
    pub fn linear(z0: &T) -> Self {
        Self::from_coeffs(vec![-z0.clone(), T::one()])
    }

    /// The product of linear factors `(z - r)` over the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, r| acc * Self::linear(r))
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `z^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn scale(mut self, c: &T) -> Self {
        for a in &mut self.coeffs {
            *a = a.clone() * c.clone();
        }
        self.trim();
        self
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| T::from_i64(k as i64) * c.clone())
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, div: &Self) -> (Self, Self) {
        let dd = div.degree().expect("division by zero polynomial");
        let lead_inv = div.leading().expect("nonzero").clone().inv();
        let mut rem = self.clone();
        let mut quot = vec![T::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().expect("nonzero").clone() * lead_inv.clone();
            let shift = rd - dd;
            quot[shift] = factor.clone();
            let sub = div.clone().scale(&factor);
            let mut shifted = vec![T::zero(); shift];
            shifted.extend(sub.coeffs);
            rem = rem - Self::from_coeffs(shifted);
        }
        (Self::from_coeffs(quot), rem)
    }

    /// Division that must be exact; panics on a nonzero remainder.
    pub fn div_exact(&self, div: &Self) -> Self {
        let (q, r) = self.div_rem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic normalization (zero stays zero).
    pub fn monic(self) -> Self {
        match self.leading() {
            None => self,
            Some(l) => {
                let inv = l.clone().inv();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    /// Multiplicity of `z0` as a root.
    pub fn root_multiplicity(&self, z0: &T) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Self::linear(z0);
        let mut p = self.clone();
        let mut m = 0;
        while p.eval(z0).is_zero() {
            p = p.div_exact(&lin);
            m += 1;
        }
        m
    }

    /// Lagrange interpolation through `(abscissa, value)` pairs with
    /// pairwise distinct abscissae.
    pub fn interpolate(points: &[(T, T)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Self::one();
            let mut denom = T::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = xi.clone() - xj.clone();
                assert!(!diff.is_zero(), "repeated interpolation abscissa");
                basis = basis * Self::linear(xj);
                denom = denom * diff;
            }
            acc = acc + basis.scale(&(yi.clone() * denom.inv()));
        }
        acc
    }
}

impl<T: Scalar> Add for Poly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        Self::from_coeffs(coeffs)
    }
}

impl<T: Scalar> Sub for Poly<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for Poly<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = -c.clone();
        }
        self
    }
}

impl<T: Scalar> Mul for Poly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(coeffs)
    }
}

impl<T: Scalar> Ring for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }

    fn one() -> Self {
        Poly::one()
    }

    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

/// Reduced rational function `num/den` with monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RatFunc<T: Scalar> {
    num: Poly<T>,
    den: Poly<T>,
}

impl<T: Scalar> RatFunc<T> {
    pub fn new(num: Poly<T>, den: Poly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(CoreError::ZeroDenominator);
        }
        Ok(Self { num, den }.reduced())
    }

    pub fn from_poly(num: Poly<T>) -> Self {
        Self {
            num,
            den: Poly::one(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn num(&self) -> &Poly<T> {
        &self.num
    }

    pub fn den(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels common factors and makes the denominator monic. Stored values
    /// are always reduced; this is public so tests can assert idempotence.
    pub fn reduced(self) -> Self {
        let g = Poly::gcd(&self.num, &self.den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (self.num, self.den)
        } else {
            (self.num.div_exact(&g), self.den.div_exact(&g))
        };
        let lead_inv = den.leading().expect("nonzero denominator").clone().inv();
        num = num.scale(&lead_inv);
        den = den.scale(&lead_inv);
        Self { num, den }
    }

    /// Evaluation; `None` at a pole.
    pub fn eval(&self, z: &T) -> Option<T> {
        let d = self.den.eval(z);
        d.checked_inv().map(|di| self.num.eval(z) * di)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Order of vanishing at `z0` (negative at a pole).
    pub fn valuation(&self, z0: &T) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        self.num.root_multiplicity(z0) as i64 - self.den.root_multiplicity(z0) as i64
    }

    /// Laurent coefficients `c_{-1}, c_0, ..., c_order` around `z0`.
    ///
    /// Requires at most a simple pole at `z0`; returns `HigherOrderPole`
    /// otherwise.
    pub fn laurent_expand(&self, z0: &T, order: usize) -> Result<Vec<T>> {
        let lin = Poly::linear(z0);
        let mut den = self.den.clone();
        let mut pole = 0usize;
        while den.eval(z0).is_zero() {
            den = den.div_exact(&lin);
            pole += 1;
            if pole > 1 {
                return Err(CoreError::HigherOrderPole);
            }
        }
        let den_at = den.eval(z0);
        let den_inv = den_at.inv();
        let mut coeffs = Vec::with_capacity(order + 2);
        let mut num = self.num.clone();
        if pole == 1 {
            let c = num.eval(z0) * den_inv.clone();
            num = (num - den.clone().scale(&c)).div_exact(&lin);
            coeffs.push(c);
        } else {
            coeffs.push(T::zero());
        }
        for _ in 0..=order {
            let c = num.eval(z0) * den_inv.clone();
            num = (num - den.clone().scale(&c)).div_exact(&lin);
            coeffs.push(c);
        }
        Ok(coeffs)
    }

    /// Residue at a simple pole (zero if the function is regular there).
    pub fn residue(&self, z0: &T) -> Result<T> {
        Ok(self.laurent_expand(z0, 0)?.remove(0))
    }

    pub fn derivative(&self) -> Self {
        let num = self.num.derivative() * self.den.clone()
            - self.num.clone() * self.den.derivative();
        let den = self.den.clone() * self.den.clone();
        Self { num, den }.reduced()
    }
}

impl<T: Scalar> Add for RatFunc<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let num = self.num * rhs.den.clone() + rhs.num * self.den.clone();
        let den = self.den * rhs.den;
        Self { num, den }.reduced()
    }
}

impl<T: Scalar> Sub for RatFunc<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Neg for RatFunc<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.num = -self.num;
        self
    }
}

impl<T: Scalar> Mul for RatFunc<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let num = self.num * rhs.num;
        let den = self.den * rhs.den;
        Self { num, den }.reduced()
    }
}

impl<T: Scalar> std::ops::Div for RatFunc<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero rational function");
        let num = self.num * rhs.den;
        let den = self.den * rhs.num;
        Self { num, den }.reduced()
    }
}

impl<T: Scalar> Ring for RatFunc<T> {
    fn zero() -> Self {
        RatFunc::zero()
    }

    fn one() -> Self {
        RatFunc::one()
    }

    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}
