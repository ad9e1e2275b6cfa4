//! Dyadic big-float arithmetic.
//!
//! The only place the crate leaves exact rational arithmetic is the infinite
//! q-Pochhammer products in the closed-form norm constants. Those are
//! evaluated as dyadic floats `mant * 2^exp` with an explicit working
//! precision. Addition and subtraction are exact; multiplication and division
//! round the result back to the requested precision (round to nearest, ties
//! away from zero). Conversion back to `BigRational` is always exact, so
//! error bounds can be checked in exact arithmetic.

use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// A dyadic floating-point value `mant * 2^exp`.
#[derive(Debug, Clone, PartialEq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Rounds a rational to `prec` significant bits.
    pub fn from_rat(r: &BigRational, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let num = r.numer().clone();
        let den = r.denom().clone();
        // Scale the numerator so the quotient carries prec + 1 bits, divide
        // with rounding, then trim back to prec.
        let nbits = num.bits() as i64;
        let dbits = den.bits() as i64;
        let shift = (prec as i64 + 1 - (nbits - dbits)).max(0);
        let scaled = num << (shift as usize);
        let rounded = div_rounded(&scaled, &den);
        Self {
            mant: rounded,
            exp: -shift,
        }
        .round_to(prec)
    }

    /// Exact conversion back to a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(self.mant.clone() << (self.exp as usize))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    /// Exact addition (no rounding; callers round products instead).
    pub fn add(&self, rhs: &Self) -> Self {
        let (a, b) = align(self, rhs);
        Self {
            mant: a.mant + b.mant,
            exp: a.exp,
        }
        .normalized()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -self.mant.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Product rounded to `prec` bits.
    pub fn mul(&self, rhs: &Self, prec: u32) -> Self {
        Self {
            mant: &self.mant * &rhs.mant,
            exp: self.exp + rhs.exp,
        }
        .round_to(prec)
    }

    /// Quotient rounded to `prec` bits.
    pub fn div(&self, rhs: &Self, prec: u32) -> Self {
        assert!(!rhs.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let nbits = self.mant.bits() as i64;
        let dbits = rhs.mant.bits() as i64;
        let shift = (prec as i64 + 1 - (nbits - dbits)).max(0);
        let scaled = self.mant.clone() << (shift as usize);
        let rounded = div_rounded(&scaled, &rhs.mant);
        Self {
            mant: rounded,
            exp: self.exp - rhs.exp - shift,
        }
        .round_to(prec)
    }

    /// Rounds to `prec` significant bits (nearest, ties away from zero).
    pub fn round_to(self, prec: u32) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.normalized();
        }
        let drop = (bits - prec as u64) as usize;
        let (sign, mag) = (self.mant.sign(), self.mant.magnitude().clone());
        let half = num::BigUint::one() << (drop - 1);
        let shifted = (mag + half) >> drop;
        let mant = match sign {
            Sign::Minus => -BigInt::from(shifted),
            _ => BigInt::from(shifted),
        };
        Self {
            mant,
            exp: self.exp + drop as i64,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
        self
    }
}

/// Rounded integer division (nearest, ties away from zero).
fn div_rounded(num: &BigInt, den: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let doubled = num * &two;
    let q2 = &doubled / den;
    let adjust = if (q2.clone() % &two).is_zero() {
        BigInt::zero()
    } else if q2.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    (q2 + adjust) / two
}

fn align(a: &BigFloat, b: &BigFloat) -> (BigFloat, BigFloat) {
    if a.exp <= b.exp {
        let shift = (b.exp - a.exp) as usize;
        (
            a.clone(),
            BigFloat {
                mant: b.mant.clone() << shift,
                exp: a.exp,
            },
        )
    } else {
        let (y, x) = align(b, a);
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn dyadic_roundtrip_is_exact() {
        let x = BigFloat::from_rat(&rat(5, 4), 20);
        assert_eq!(x.to_rational(), rat(5, 4));
        let y = BigFloat::from_rat(&rat(-7, 32), 10);
        assert_eq!(y.to_rational(), rat(-7, 32));
    }

    #[test]
    fn non_dyadic_rounds_within_tolerance() {
        let x = BigFloat::from_rat(&rat(1, 3), 30);
        let err = (x.to_rational() - rat(1, 3)).abs();
        assert!(err < rat(1, 1 << 29));
        assert!(err > rat_int(0));
    }

    #[test]
    fn add_sub_are_exact() {
        let a = BigFloat::from_rat(&rat(1, 2), 10);
        let b = BigFloat::from_rat(&rat(1, 4), 10);
        assert_eq!(a.add(&b).to_rational(), rat(3, 4));
        assert_eq!(a.sub(&b).to_rational(), rat(1, 4));
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = BigFloat::from_rat(&rat(355, 113), 64);
        let b = BigFloat::from_rat(&rat(22, 7), 64);
        let c = a.mul(&b, 64).div(&b, 64);
        let err = (c.to_rational() - a.to_rational()).abs();
        assert!(err < rat(1, 1i64 << 60));
    }

    #[test]
    fn rounding_to_fewer_bits() {
        // 11/4 = 10.11 binary; two significant bits round to 11 = 3.
        let x = BigFloat::from_rat(&rat(11, 4), 10).round_to(2);
        assert_eq!(x.to_rational(), rat_int(3));
        let y = BigFloat::from_rat(&rat(-11, 4), 10).round_to(2);
        assert_eq!(y.to_rational(), rat_int(-3));
    }

    #[test]
    fn division_rounds_to_nearest() {
        assert_eq!(div_rounded(&BigInt::from(7), &BigInt::from(2)), BigInt::from(4));
        assert_eq!(div_rounded(&BigInt::from(-7), &BigInt::from(2)), BigInt::from(-4));
        assert_eq!(div_rounded(&BigInt::from(6), &BigInt::from(2)), BigInt::from(3));
        assert_eq!(div_rounded(&BigInt::from(5), &BigInt::from(3)), BigInt::from(2));
    }
}
