//! Fixed-precision p-adic scalars.
//!
//! A nonzero scalar is `p^valuation * unit + O(p^absolute)` with `unit` a
//! p-adic unit reduced modulo `p^(absolute - valuation)`. A scalar whose known
//! digits are all zero is stored with `unit = 0` and `valuation = absolute`;
//! the exact zero uses `absolute = EXACT`.

use core::cmp::{min, Ordering};
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{big_inv_mod, big_pow, val_int};
use crate::error::{Error, Result};

pub const EXACT: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicScalar {
    p: u64,
    valuation: i64,
    unit: BigInt,
    absolute: i64,
}

fn modulus(p: u64, digits: i64) -> BigInt {
    big_pow(p, u32::try_from(digits).expect("digit count fits u32"))
}

/// Reduces a unit to `digits` known digits; exact values are left alone.
fn reduce(unit: BigInt, p: u64, absolute: i64, valuation: i64) -> BigInt {
    if absolute == EXACT {
        unit
    } else {
        unit.mod_floor(&modulus(p, absolute - valuation))
    }
}

impl PadicScalar {
    pub fn exact_zero(p: u64) -> Self {
        Self { p, valuation: EXACT, unit: BigInt::zero(), absolute: EXACT }
    }

    /// `O(p^absolute)`.
    pub fn zero_within(p: u64, absolute: i64) -> Self {
        Self { p, valuation: absolute, unit: BigInt::zero(), absolute }
    }

    pub fn from_int(p: u64, n: i64, absolute: i64) -> Self {
        Self::from_rational(p, &BigRational::from_integer(BigInt::from(n)), absolute)
    }

    /// Exact integer (no precision cap).
    pub fn exact_int(p: u64, n: &BigInt) -> Self {
        Self::from_rational(p, &BigRational::from_integer(n.clone()), EXACT)
    }

    pub fn from_bigint(p: u64, n: &BigInt, absolute: i64) -> Self {
        Self::from_rational(p, &BigRational::from_integer(n.clone()), absolute)
    }

    /// Reduces an exact rational to absolute precision `absolute`.
    pub fn from_rational(p: u64, q: &BigRational, absolute: i64) -> Self {
        if q.is_zero() {
            return Self::exact_zero(p);
        }
        let vn = val_int(q.numer(), p).unwrap();
        let vd = val_int(q.denom(), p).unwrap_or(0);
        let v = vn - vd;
        if v >= absolute {
            return Self::zero_within(p, absolute);
        }
        let pp = BigInt::from(p);
        let num = q.numer() / num_traits::pow(pp.clone(), vn as usize);
        let den = q.denom() / num_traits::pow(pp, vd as usize);
        if absolute == EXACT {
            assert!(den.is_one() || (-&den).is_one(), "exact scalars must be p-integral up to powers of p");
            return Self { p, valuation: v, unit: num * den, absolute };
        }
        let m = modulus(p, absolute - v);
        let unit = (num * big_inv_mod(&den, &m)).mod_floor(&m);
        Self { p, valuation: v, unit, absolute }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// True when no known digit is nonzero.
    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_zero() && self.absolute == EXACT
    }

    /// Exact valuation, or `None` when the value is zero within precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.valuation)
    }

    /// Lower bound on the valuation (the absolute precision for zeros).
    pub fn valuation_bound(&self) -> i64 {
        self.valuation
    }

    pub fn absolute_precision(&self) -> i64 {
        self.absolute
    }

    /// Number of known digits beyond the valuation.
    pub fn relative_precision(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.absolute - self.valuation
        }
    }

    pub fn unit_part(&self) -> &BigInt {
        &self.unit
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// The canonical rational representative `p^v * unit`.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let pv = big_pow(self.p, self.valuation.unsigned_abs() as u32);
        let u = BigRational::from_integer(self.unit.clone());
        if self.valuation >= 0 {
            u * BigRational::from_integer(pv)
        } else {
            u / BigRational::from_integer(pv)
        }
    }

    /// Lowers the absolute precision to `absolute` (never raises it).
    pub fn with_absolute(&self, absolute: i64) -> Self {
        if absolute >= self.absolute {
            return self.clone();
        }
        if self.is_zero() || self.valuation >= absolute {
            return Self::zero_within(self.p, absolute);
        }
        let m = modulus(self.p, absolute - self.valuation);
        Self {
            p: self.p,
            valuation: self.valuation,
            unit: self.unit.mod_floor(&m),
            absolute,
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self { unit: reduce(-&self.unit, self.p, self.absolute, self.valuation), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let absolute = min(self.absolute, other.absolute);
        if self.is_zero() {
            return other.with_absolute(absolute);
        }
        if other.is_zero() {
            return self.with_absolute(absolute);
        }
        let base = min(self.valuation, other.valuation);
        if base >= absolute {
            return Self::zero_within(self.p, absolute);
        }
        let shift = |x: &Self| &x.unit * big_pow(x.p, (x.valuation - base) as u32);
        let sum = shift(self) + shift(other);
        let Some(vs) = val_int(&sum, self.p) else {
            return Self::zero_within(self.p, absolute);
        };
        let valuation = base + vs;
        if valuation >= absolute {
            return Self::zero_within(self.p, absolute);
        }
        let unit = reduce(sum / big_pow(self.p, vs as u32), self.p, absolute, valuation);
        Self { p: self.p, valuation, unit, absolute }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let absolute = min(
            self.valuation.saturating_add(other.absolute),
            other.valuation.saturating_add(self.absolute),
        );
        if self.is_zero() || other.is_zero() {
            if absolute == EXACT {
                return Self::exact_zero(self.p);
            }
            return Self::zero_within(self.p, absolute);
        }
        let valuation = self.valuation + other.valuation;
        Self {
            p: self.p,
            valuation,
            unit: reduce(&self.unit * &other.unit, self.p, absolute, valuation),
            absolute,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionLoss("inverting a value that is zero within precision".into()));
        }
        if self.absolute == EXACT {
            if self.unit.abs().is_one() {
                return Ok(Self { valuation: -self.valuation, ..self.clone() });
            }
            return Err(Error::PrecisionLoss("inverse of an exact non-trivial unit needs a finite precision".into()));
        }
        let rel = self.absolute - self.valuation;
        let m = modulus(self.p, rel);
        Ok(Self {
            p: self.p,
            valuation: -self.valuation,
            unit: big_inv_mod(&self.unit, &m),
            absolute: -self.valuation + rel,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Multiplies by `p^k` (exact shift, precision moves with the value).
    pub fn shift(&self, k: i64) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        Self {
            p: self.p,
            valuation: self.valuation + k,
            unit: self.unit.clone(),
            absolute: if self.absolute == EXACT { EXACT } else { self.absolute + k },
        }
    }

    /// Compares the known digits: equal when the difference is zero within
    /// the smaller of the two precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl PartialOrd for PadicScalar {
    /// Orders by valuation bound; ties and zeros are not ordered meaningfully.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.valuation.partial_cmp(&other.valuation)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.absolute);
        }
        let u = if self.unit.is_negative() { -&self.unit } else { self.unit.clone() };
        write!(f, "{}^{} * {} + O({}^{})", self.p, self.valuation, u, self.p, self.absolute)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn reduction_keeps_valuation_and_digits() {
        let x = PadicScalar::from_rational(3, &q(18, 5), 6);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.relative_precision(), 4);
        // 18/5 = 9 * 2/5, and 2/5 mod 81 = 2 * 65 mod 81 = 49
        assert_eq!(x.unit_part(), &BigInt::from(49));
    }

    #[test]
    fn cancellation_loses_digits_honestly() {
        let a = PadicScalar::from_int(5, 7, 10);
        let b = PadicScalar::from_int(5, 2, 10);
        let s = a.add(&b);
        let back = s.sub(&b);
        assert!(back.agrees_with(&a));
        let c = PadicScalar::from_int(5, 7 + 5i64.pow(4), 4);
        let d = a.sub(&c);
        assert!(d.is_zero());
        assert_eq!(d.absolute_precision(), 4);
    }

    #[test]
    fn multiplication_precision_rule() {
        let a = PadicScalar::from_rational(3, &q(3, 1), 5); // 3 + O(3^5)
        let b = PadicScalar::from_rational(3, &q(1, 9), 3); // 3^-2 + O(3^3)
        let c = a.mul(&b);
        assert_eq!(c.valuation(), Some(-1));
        assert_eq!(c.absolute_precision(), 3); // min(1 + 3, -2 + 5)
        assert_eq!(c.to_rational(), q(1, 3));
    }

    #[test]
    fn exact_values_mix_with_finite_ones() {
        let e = PadicScalar::exact_int(3, &BigInt::from(-54));
        assert_eq!(e.valuation(), Some(3));
        assert_eq!(e.to_rational(), q(-54, 1));
        let f = PadicScalar::from_int(3, 5, 6);
        let s = e.add(&f);
        assert_eq!(s.absolute_precision(), 6);
        assert_eq!(s.to_rational(), q(-49 + 729, 1));
        let m = e.mul(&f);
        assert_eq!(m.absolute_precision(), 9);
        assert!(PadicScalar::exact_int(3, &BigInt::from(2)).inverse().is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let a = PadicScalar::from_rational(7, &q(49 * 3, 2), 12);
        let inv = a.inverse().unwrap();
        let one = a.mul(&inv);
        assert!(one.agrees_with(&PadicScalar::from_int(7, 1, 8)));
        assert!(PadicScalar::zero_within(7, 3).inverse().is_err());
    }
}
