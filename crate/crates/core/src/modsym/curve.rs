//! Weierstrass data and naive point counting.

use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::arith::{factor, is_prime, kronecker, pow_mod};
use crate::error::{invalid, Error, Result};

/// Largest prime for which `count_points` enumerates.
pub const POINT_COUNT_BOUND: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveData {
    pub label: String,
    pub a_invariants: [i64; 5],
    pub conductor: u64,
    #[serde(default)]
    pub ap_cache: BTreeMap<u64, i64>,
}

/// The b- and c-invariants and discriminant of a Weierstrass model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub b2: i128,
    pub b4: i128,
    pub b6: i128,
    pub b8: i128,
    pub c4: i128,
    pub c6: i128,
    pub discriminant: i128,
}

impl CurveData {
    pub fn new(label: &str, a_invariants: [i64; 5], conductor: u64) -> Result<Self> {
        let curve = Self {
            label: label.into(),
            a_invariants,
            conductor,
            ap_cache: BTreeMap::new(),
        };
        let disc = curve.invariants().discriminant;
        if disc == 0 {
            return Err(invalid!("singular Weierstrass model"));
        }
        if conductor == 0 {
            return Err(invalid!("conductor must be positive"));
        }
        for (q, _) in factor(conductor) {
            if disc % q as i128 != 0 {
                return Err(invalid!("{q} divides the conductor but not the discriminant"));
            }
        }
        Ok(curve)
    }

    pub fn invariants(&self) -> Invariants {
        let [a1, a2, a3, a4, a6] = self.a_invariants.map(|a| a as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        let discriminant = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        Invariants { b2, b4, b6, b8, c4, c6, discriminant }
    }

    /// `a_ell = ell + 1 - #E(F_ell)` at a prime of good reduction.
    pub fn count_points(&self, ell: u64) -> Result<i64> {
        if !is_prime(ell) {
            return Err(invalid!("{ell} is not prime"));
        }
        if self.conductor % ell == 0 {
            return Err(Error::BadReduction { ell });
        }
        if ell > POINT_COUNT_BOUND {
            return Err(Error::Resource(alloc::format!(
                "point counting is limited to primes up to {POINT_COUNT_BOUND}"
            )));
        }
        if let Some(&a) = self.ap_cache.get(&ell) {
            return Ok(a);
        }
        Ok(self.count_points_uncached(ell))
    }

    fn count_points_uncached(&self, ell: u64) -> i64 {
        if ell == 2 {
            let [a1, a2, a3, a4, a6] = self.a_invariants.map(|a| a.rem_euclid(2));
            let mut affine = 0i64;
            for x in 0..2 {
                for y in 0..2 {
                    let lhs = y * y + a1 * x * y + a3 * y;
                    let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                    if (lhs - rhs).rem_euclid(2) == 0 {
                        affine += 1;
                    }
                }
            }
            return 2 + 1 - (affine + 1);
        }
        let inv = self.invariants();
        let l = ell as i128;
        let (b2, b4, b6) = (inv.b2.rem_euclid(l), inv.b4.rem_euclid(l), inv.b6.rem_euclid(l));
        let mut sum = 0i64;
        for x in 0..l {
            let f = ((4 * x % l * x % l * x) + b2 * x % l * x + 2 * b4 * x + b6).rem_euclid(l);
            sum += legendre(f as u64, ell);
        }
        -sum
    }

    /// Fills the cache for all good primes up to `bound`.
    pub fn fill_ap_cache(&mut self, bound: u64) {
        for ell in 2..=bound.min(POINT_COUNT_BOUND) {
            if is_prime(ell) && self.conductor % ell != 0 && !self.ap_cache.contains_key(&ell) {
                let a = self.count_points_uncached(ell);
                self.ap_cache.insert(ell, a);
            }
        }
    }

    /// Every cached value agrees with a fresh count.
    pub fn cache_is_consistent(&self) -> bool {
        self.ap_cache.iter().all(|(&ell, &a)| self.count_points_uncached(ell) == a)
    }

    /// The quadratic twist by the field of discriminant `d` as the short model
    /// `y^2 = x^3 - 27 c4 d^2 x - 54 c6 d^3` (not minimal). The conductor is
    /// supplied by the caller.
    pub fn quadratic_twist(&self, d: i64, label: &str, conductor: u64) -> Result<Self> {
        let inv = self.invariants();
        // y^2 = x^3 - 27 c4 x - 54 c6 is isomorphic to E over Q; twist by d
        let a4 = -27 * inv.c4 * (d as i128) * (d as i128);
        let a6 = -54 * inv.c6 * (d as i128).pow(3);
        let a4 = i64::try_from(a4).map_err(|_| invalid!("twisted model overflows"))?;
        let a6 = i64::try_from(a6).map_err(|_| invalid!("twisted model overflows"))?;
        Self::new(label, [0, 0, 0, a4, a6], conductor)
    }
}

pub fn legendre(a: u64, ell: u64) -> i64 {
    if a % ell == 0 {
        0
    } else if pow_mod(a, (ell - 1) / 2, ell) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker character of a fundamental discriminant evaluated at `n`.
pub fn chi_d(d: i64, n: i64) -> i64 {
    if d == 1 {
        return 1;
    }
    let m = d.unsigned_abs() as i64;
    let r = n.rem_euclid(m);
    if r == 0 {
        return 0;
    }
    kronecker(d, r as u64) as i64
}

/// The curves used in the examples: 32a1, 40a1, 56a1, and 11a1 for small tests.
pub fn builtin_curve(label: &str) -> Option<CurveData> {
    let (a, n) = match label {
        "11a1" | "11a" | "11A" => ([0, -1, 1, -10, -20], 11),
        "32a1" | "32a" | "32A" => ([0, 0, 0, -1, 0], 32),
        "40a1" | "40a" | "40A" => ([0, 0, 0, -7, -6], 40),
        "56a1" | "56a" | "56A" => ([0, 0, 0, 1, 2], 56),
        _ => return None,
    };
    CurveData::new(label, a, n).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn congruent_number_curve_counts() {
        let e = builtin_curve("32a").unwrap();
        assert_eq!(e.count_points(3).unwrap(), 0);
        assert_eq!(e.count_points(7).unwrap(), 0);
        assert_eq!(e.count_points(5).unwrap(), -2);
        assert!(matches!(e.count_points(2), Err(Error::BadReduction { ell: 2 })));
    }

    #[test]
    fn brute_force_mod_three_table() {
        // y^2 = x^3 - x over F_3: enumerate all nine pairs
        let mut affine = 0;
        for x in 0..3i64 {
            for y in 0..3i64 {
                if (y * y - (x * x * x - x)).rem_euclid(3) == 0 {
                    affine += 1;
                }
            }
        }
        assert_eq!(3 + 1 - (affine + 1), 0);
    }

    #[test]
    fn hasse_bound_and_known_values() {
        let e11 = builtin_curve("11a").unwrap();
        let expected = [(2u64, -2i64), (3, -1), (5, 1), (7, -2), (13, 4), (17, -2), (19, 0)];
        for (l, a) in expected {
            assert_eq!(e11.count_points(l).unwrap(), a, "ell = {l}");
        }
        for label in ["32a", "40a", "56a"] {
            let mut e = builtin_curve(label).unwrap();
            assert_eq!(e.count_points(3).unwrap(), 0, "{label} is supersingular at 3");
            e.fill_ap_cache(200);
            assert!(e.cache_is_consistent());
            for (&l, &a) in &e.ap_cache {
                assert!((a * a) as u64 <= 4 * l);
            }
        }
    }

    #[test]
    fn twisted_traces() {
        let e = builtin_curve("32a").unwrap();
        let t = e.quadratic_twist(-3, "288-twist", 288).unwrap();
        for l in [5u64, 7, 11, 13, 17, 19, 23] {
            assert_eq!(
                t.count_points(l).unwrap(),
                chi_d(-3, l as i64) * e.count_points(l).unwrap()
            );
        }
    }
}
