//! Small-integer number theory shared by every other module.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g >= 0.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let (g, s, _) = xgcd(a.rem_euclid(m), m);
    if g != 1 {
        None
    } else {
        Some(s.rem_euclid(m))
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

pub fn ipow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("integer power overflows u64")
}

/// Euler totient of p^k.
pub fn phi_prime_power(p: u64, k: u32) -> u64 {
    if k == 0 {
        1
    } else {
        (p - 1) * ipow(p, k - 1)
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .map(|(q, e)| phi_prime_power(q, e))
        .product()
}

/// Kronecker symbol (a / n) for n > 0.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    // factors of two in n
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a / n) for odd n
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// True when `d` is the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |m: u64| factor(m).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Smallest primitive root modulo p^k (p odd).
pub fn primitive_root_prime_power(p: u64, k: u32) -> u64 {
    let modulus = ipow(p, k);
    let order = phi_prime_power(p, k);
    let prime_factors: Vec<u64> = factor(order).into_iter().map(|(q, _)| q).collect();
    (2..modulus)
        .find(|&g| {
            g % p != 0
                && prime_factors
                    .iter()
                    .all(|&q| pow_mod(g, order / q, modulus) != 1)
        })
        .expect("p^k has a primitive root for odd p")
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn val_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

pub fn val_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn val_rat(q: &BigRational, p: u64) -> Option<i64> {
    let vn = val_int(q.numer(), p)?;
    let vd = val_int(q.denom(), p).unwrap_or(0);
    Some(vn - vd)
}

pub fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Content (gcd of all entries, non-negative).
pub fn content(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |g, v| g.gcd(v))
}

/// Inverse of a unit modulo m (both BigInt); panics if not invertible.
pub fn big_inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_matches_legendre_for_small_primes() {
        for &q in &[3u64, 5, 7, 11, 13] {
            for a in -20i64..20 {
                let leg = if a.rem_euclid(q as i64) == 0 {
                    0
                } else if (1..q).any(|x| (x * x) % q == a.rem_euclid(q as i64) as u64) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, q), leg, "a={a} q={q}");
            }
        }
    }

    #[test]
    fn kronecker_is_a_character_mod_discriminant() {
        for d in [-3i64, -4, -7, -8, -43, -107] {
            let m = d.unsigned_abs();
            for n in 1u64..60 {
                assert_eq!(kronecker(d, n), kronecker(d, n + m), "d={d} n={n}");
            }
        }
        // 3 is inert in Q(sqrt(-43)) and split in Q(sqrt(-107)).
        assert_eq!(kronecker(-43, 3), -1);
        assert_eq!(kronecker(-107, 3), 1);
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, -7, -8, -43, -107, -283, -331, -139, -487, 5, 8, 12] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [-12, -16, 4, 9, -1, 0, 1, -9] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root_prime_power(3, 4), 2);
        assert_eq!(primitive_root_prime_power(5, 2), 2);
        assert_eq!(primitive_root_prime_power(7, 2), 3);
    }
}
