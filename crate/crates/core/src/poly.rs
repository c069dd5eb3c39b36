//! Dense univariate polynomials over Z and Q with exact big-integer arithmetic.
//! Coefficient vectors are little-endian (index = degree).

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::content;

pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(BigInt::zero());
    }
}

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn zmul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![BigInt::zero()];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

pub fn zadd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()
        })
        .collect();
    trim(&mut out);
    out
}

pub fn zscale(a: &[BigInt], s: &BigInt) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| c * s).collect();
    trim(&mut out);
    out
}

/// Remainder modulo a monic integer polynomial.
pub fn zrem_monic(a: &[BigInt], m: &[BigInt]) -> ZPoly {
    let dm = degree(m).expect("nonzero modulus");
    assert!(m[dm].is_one(), "modulus must be monic");
    let mut r: ZPoly = a.to_vec();
    if r.len() <= dm {
        trim(&mut r);
        return r;
    }
    let support: Vec<(usize, BigInt)> = m[..dm]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect();
    for top in (dm..r.len()).rev() {
        let c = core::mem::take(&mut r[top]);
        if c.is_zero() {
            continue;
        }
        let base = top - dm;
        for (i, mi) in &support {
            r[base + i] -= &c * mi;
        }
    }
    r.truncate(dm.max(1));
    trim(&mut r);
    r
}

/// Rewrites `sum c_i Y^i` as a polynomial in X with Y = 1 + X.
pub fn shift_by_one(c: &[BigInt]) -> ZPoly {
    let n = c.len();
    let mut out = vec![BigInt::zero(); n.max(1)];
    // Horner in Y = 1 + X: out = (out * (1 + X)) + c_i
    for coeff in c.iter().rev() {
        for j in (1..n).rev() {
            let prev = out[j - 1].clone();
            out[j] += prev;
        }
        out[0] += coeff;
    }
    trim(&mut out);
    out
}

/// Exact polynomial over Q stored as integer numerators over one denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    num: ZPoly,
    den: BigInt,
}

impl QPoly {
    pub fn new(num: ZPoly, den: BigInt) -> Self {
        assert!(!den.is_zero());
        let mut q = Self { num, den };
        q.normalize();
        q
    }

    pub fn from_int(num: ZPoly) -> Self {
        Self::new(num, BigInt::one())
    }

    pub fn zero() -> Self {
        Self::from_int(vec![BigInt::zero()])
    }

    fn normalize(&mut self) {
        trim(&mut self.num);
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let g = content(&self.num).gcd(&self.den);
        if !g.is_zero() && !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
        if degree(&self.num).is_none() {
            self.den = BigInt::one();
        }
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn degree(&self) -> Option<usize> {
        degree(&self.num)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num.get(i).cloned().unwrap_or_default(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.num.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.den.lcm(&other.den);
        let a = zscale(&self.num, &(&l / &self.den));
        let b = zscale(&other.num, &(&l / &other.den));
        Self::new(zadd(&a, &b), l)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(zmul(&self.num, &other.num), &self.den * &other.den)
    }

    pub fn mul_z(&self, other: &[BigInt]) -> Self {
        Self::new(zmul(&self.num, other), self.den.clone())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(zscale(&self.num, s.numer()), &self.den * s.denom())
    }

    pub fn rem_monic(&self, m: &[BigInt]) -> Self {
        Self::new(zrem_monic(&self.num, m), self.den.clone())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.num.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc / BigRational::from_integer(self.den.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn shift_matches_binomial_expansion() {
        // Y^2 + Y + 1 at Y = 1 + X is X^2 + 3X + 3
        assert_eq!(shift_by_one(&z(&[1, 1, 1])), z(&[3, 3, 1]));
    }

    #[test]
    fn remainder_by_monic() {
        // (X^3 + 2X + 5) mod (X^2 + 1) = X + 5
        assert_eq!(zrem_monic(&z(&[5, 2, 0, 1]), &z(&[1, 0, 1])), z(&[5, 1]));
    }

    #[test]
    fn qpoly_normalizes() {
        let a = QPoly::new(z(&[2, 4]), BigInt::from(-6));
        assert_eq!(a.numerators(), &z(&[-1, -2])[..]);
        assert_eq!(a.denominator(), &BigInt::from(3));
    }
}
