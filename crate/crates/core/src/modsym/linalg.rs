//! Sparse exact vectors over Q and dense elimination modulo a 61-bit prime.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Sparse rational vector: sorted `(index, value)` pairs with nonzero values.
pub type SparseVec = Vec<(usize, BigRational)>;

/// `acc += s * v`.
pub fn axpy(acc: &SparseVec, s: &BigRational, v: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(acc.len() + v.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < v.len() {
        let take_left = j >= v.len() || (i < acc.len() && acc[i].0 < v[j].0);
        let take_right = i >= acc.len() || (j < v.len() && v[j].0 < acc[i].0);
        if take_left {
            out.push(acc[i].clone());
            i += 1;
        } else if take_right {
            out.push((v[j].0, s * &v[j].1));
            j += 1;
        } else {
            let x = &acc[i].1 + s * &v[j].1;
            if !x.is_zero() {
                out.push((acc[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(v: &SparseVec, s: &BigRational) -> SparseVec {
    if s.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * s)).collect()
}

pub fn coeff(v: &SparseVec, idx: usize) -> BigRational {
    match v.binary_search_by_key(&idx, |e| e.0) {
        Ok(k) => v[k].1.clone(),
        Err(_) => BigRational::zero(),
    }
}

pub fn dot(v: &SparseVec, dense: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |acc, (i, x)| acc + x * &dense[*i])
}

pub fn unit(idx: usize) -> SparseVec {
    vec![(idx, BigRational::one())]
}

/// Mersenne prime 2^61 - 1.
pub const MODULUS: u64 = (1 << 61) - 1;

#[inline]
pub fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

pub fn invmod(a: u64) -> u64 {
    powmod(a, MODULUS - 2)
}

pub fn rat_mod(q: &BigRational) -> u64 {
    let m = BigInt::from(MODULUS);
    let n = (q.numer() % &m + &m) % &m;
    let d = (q.denom() % &m + &m) % &m;
    mulmod(n.to_u64().unwrap(), invmod(d.to_u64().unwrap()))
}

/// Incremental row echelon form over F_MODULUS.
#[derive(Clone, Debug)]
pub struct ModEchelon {
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModEchelon {
    pub fn new(width: usize) -> Self {
        Self { width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current basis and inserts it if independent.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), self.width);
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let f = row[p];
            if f != 0 {
                let neg = MODULUS - f;
                for (x, y) in row.iter_mut().zip(r) {
                    if *y != 0 {
                        *x = (*x + mulmod(neg, *y)) % MODULUS;
                    }
                }
            }
        }
        let Some(p) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = invmod(row[p]);
        for x in row.iter_mut() {
            *x = mulmod(*x, inv);
        }
        // keep the basis fully reduced
        for r in self.rows.iter_mut() {
            let f = r[p];
            if f != 0 {
                let neg = MODULUS - f;
                for (x, y) in r.iter_mut().zip(&row) {
                    if *y != 0 {
                        *x = (*x + mulmod(neg, *y)) % MODULUS;
                    }
                }
            }
        }
        self.rows.push(row);
        self.pivots.push(p);
        true
    }

    /// Basis of the right kernel `{x : row . x = 0 for all rows}`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let mut is_pivot = vec![None; self.width];
        for (k, &p) in self.pivots.iter().enumerate() {
            is_pivot[p] = Some(k);
        }
        let mut out = Vec::new();
        for free in 0..self.width {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![0u64; self.width];
            v[free] = 1;
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = (MODULUS - r[free]) % MODULUS;
            }
            out.push(v);
        }
        out
    }
}

/// Rational reconstruction of `a mod MODULUS` with numerator and denominator
/// bounded by `sqrt(MODULUS / 2)`.
pub fn rational_reconstruct(a: u64) -> Option<BigRational> {
    let bound: i128 = 1 << 30;
    let (mut r0, mut r1) = (MODULUS as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 >= bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() >= bound {
        return None;
    }
    let q = BigRational::new(BigInt::from(r1), BigInt::from(t1));
    (rat_mod(&q) == a).then_some(q)
}

/// Smallest positive rational `c` such that every entry of `v / c` is an
/// integer and the entries have gcd 1.
pub fn content_of(values: &[BigRational]) -> BigRational {
    use num_integer::Integer;
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    if num.is_zero() {
        return BigRational::one();
    }
    BigRational::new(num.abs(), den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruction_round_trip() {
        for (n, d) in [(3i64, 7i64), (-5, 12), (0, 1), (123456, 789)] {
            let q = BigRational::new(n.into(), d.into());
            assert_eq!(rational_reconstruct(rat_mod(&q)), Some(q));
        }
    }

    #[test]
    fn kernel_of_rank_one_system() {
        let mut e = ModEchelon::new(3);
        e.insert(vec![1, 2, 3]);
        e.insert(vec![2, 4, 6]);
        assert_eq!(e.rank(), 1);
        let k = e.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            let s = (v[0] + mulmod(2, v[1]) + mulmod(3, v[2])) % MODULUS;
            assert_eq!(s, 0);
        }
    }
}
