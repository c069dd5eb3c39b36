//! Exact arithmetic in cyclotomic rings `Z[zeta_m]`, Dirichlet characters of
//! p-power conductor, Gauss sums, and the embedding of `Z[zeta_{p^k}]` into
//! the Eisenstein quotient `Z_p[X] / Phi_{p^k}(1 + X)` via `zeta -> 1 + X`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    binomial_row, content, euler_phi, factor, ipow, is_prime, phi_prime_power,
    primitive_root_prime_power,
};
use crate::error::{invalid, Error, Result};
use crate::padic::PadicScalar;
use crate::poly::{self, zrem_monic, ZPoly};

/// Cyclotomic polynomial `Phi_m(x)` as an integer coefficient vector.
pub fn cyclotomic_poly_m(m: u64) -> ZPoly {
    assert!(m >= 1);
    // x^m - 1 divided by Phi_d for every proper divisor d of m
    let mut num: ZPoly = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            num = exact_div_monic(&num, &cyclotomic_poly_m(d));
        }
    }
    num
}

fn exact_div_monic(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let db = poly::degree(b).unwrap();
    let da = poly::degree(a).unwrap();
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    q
}

/// `Phi_{p^k}(1 + X)`: the Eisenstein polynomial of the level-k layer.
pub fn cyclotomic_poly(p: u64, k: u32) -> Result<ZPoly> {
    if k == 0 {
        return Err(invalid!("level must be at least 1"));
    }
    if !is_prime(p) {
        return Err(invalid!("{p} is not prime"));
    }
    let step = ipow(p, k - 1) as usize;
    let mut y_poly = vec![BigInt::zero(); (p as usize - 1) * step + 1];
    for i in 0..p as usize {
        y_poly[i * step] = BigInt::one();
    }
    Ok(poly::shift_by_one(&y_poly))
}

/// An element `(1/denominator) * sum coeffs[i] zeta_m^i` of `Q(zeta_m)`,
/// stored canonically in the power basis of length `phi(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicInt {
    conductor: u64,
    coeffs: Vec<BigInt>,
    denominator: BigInt,
}

/// Sparse `Phi_m` used for reduction.
fn sparse_phi(m: u64) -> Vec<(usize, BigInt)> {
    cyclotomic_poly_m(m)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

impl CyclotomicInt {
    pub fn zero(conductor: u64) -> Self {
        let d = euler_phi(conductor) as usize;
        Self { conductor, coeffs: vec![BigInt::zero(); d], denominator: BigInt::one() }
    }

    pub fn from_int(conductor: u64, n: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(conductor);
        z.coeffs[0] = n.into();
        z
    }

    pub fn one(conductor: u64) -> Self {
        Self::from_int(conductor, 1)
    }

    pub fn from_rational(conductor: u64, q: &BigRational) -> Self {
        let mut z = Self::zero(conductor);
        z.coeffs[0] = q.numer().clone();
        z.denominator = q.denom().clone();
        z.normalized()
    }

    /// `zeta_m^e` for any integer exponent.
    pub fn zeta_power(conductor: u64, e: i64) -> Self {
        let mut exps = vec![BigInt::zero(); conductor as usize];
        exps[e.rem_euclid(conductor as i64) as usize] = BigInt::one();
        Self::from_exponent_sums(conductor, exps)
    }

    /// Builds `sum_e weights[e] zeta_m^e` from a table indexed by `e mod m`.
    pub fn from_exponent_sums(conductor: u64, weights: Vec<BigInt>) -> Self {
        assert_eq!(weights.len() as u64, conductor);
        Self::from_raw(conductor, weights, BigInt::one())
    }

    fn from_raw(conductor: u64, raw: Vec<BigInt>, denominator: BigInt) -> Self {
        let d = euler_phi(conductor) as usize;
        let mut r = raw;
        // fold x^m = 1
        if r.len() > conductor as usize {
            let m = conductor as usize;
            let extra: Vec<BigInt> = r.drain(m..).collect();
            for (i, c) in extra.into_iter().enumerate() {
                r[i % m] += c;
            }
        }
        let phi = sparse_phi(conductor);
        if r.len() > d {
            for top in (d..r.len()).rev() {
                let c = core::mem::take(&mut r[top]);
                if c.is_zero() {
                    continue;
                }
                let base = top - d;
                for (i, mi) in &phi {
                    if *i < d {
                        r[base + i] -= &c * mi;
                    }
                }
            }
        }
        r.resize(d, BigInt::zero());
        Self { conductor, coeffs: r, denominator }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.denominator.is_negative() {
            self.denominator = -&self.denominator;
            for c in &mut self.coeffs {
                *c = -&*c;
            }
        }
        let g = content(&self.coeffs).gcd(&self.denominator);
        if self.coeffs.iter().all(|c| c.is_zero()) {
            self.denominator = BigInt::one();
        } else if !g.is_one() {
            for c in &mut self.coeffs {
                *c /= &g;
            }
            self.denominator /= &g;
        }
        self
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Returns the rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| BigRational::new(self.coeffs[0].clone(), self.denominator.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.conductor, other.conductor);
        let l = self.denominator.lcm(&other.denominator);
        let sa = &l / &self.denominator;
        let sb = &l / &other.denominator;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * &sa + b * &sb)
            .collect();
        Self { conductor: self.conductor, coeffs, denominator: l }.normalized()
    }

    pub fn neg(&self) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            denominator: self.denominator.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.conductor, other.conductor);
        let raw = poly::zmul(&self.coeffs, &other.coeffs);
        Self::from_raw(self.conductor, raw, &self.denominator * &other.denominator)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * s.numer()).collect(),
            denominator: &self.denominator * s.denom(),
        }
        .normalized()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.conductor);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The Galois automorphism `zeta -> zeta^a` (a coprime to the conductor).
    pub fn galois(&self, a: i64) -> Self {
        let m = self.conductor as i64;
        let mut raw = vec![BigInt::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[(a * i as i64).rem_euclid(m) as usize] += c;
        }
        Self::from_raw(self.conductor, raw, self.denominator.clone())
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Image under `Q(zeta_m) -> Q(zeta_{m'})` for m | m'.
    pub fn lift(&self, conductor: u64) -> Self {
        assert!(conductor % self.conductor == 0);
        let step = conductor / self.conductor;
        let mut raw = vec![BigInt::zero(); conductor as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step as usize] += c;
        }
        Self::from_raw(conductor, raw, self.denominator.clone())
    }

    /// Field norm to Q, computed as the product of all conjugates.
    pub fn norm(&self) -> BigRational {
        let m = self.conductor as i64;
        let mut acc = Self::one(self.conductor);
        for a in 1..m.max(2) {
            if a.gcd(&m) == 1 {
                acc = acc.mul(&self.galois(a));
            }
        }
        acc.as_rational().expect("norm is rational")
    }

    /// Inverse of `zeta_m^e - 1` for `zeta_m^e != 1`, via
    /// `1/(eta - 1) = (1/q) sum_{i<q} i eta^i` where `q` is the order of `eta`.
    pub fn inverse_zeta_power_minus_one(conductor: u64, e: i64) -> Result<Self> {
        let m = conductor as i64;
        let e = e.rem_euclid(m);
        if e == 0 {
            return Err(invalid!("zeta^0 - 1 is zero"));
        }
        let q = m / e.gcd(&m);
        let mut raw = vec![BigInt::zero(); conductor as usize];
        for i in 0..q {
            raw[(e * i).rem_euclid(m) as usize] += BigInt::from(i);
        }
        Ok(Self::from_raw(conductor, raw, BigInt::from(q)))
    }

    /// Coefficients in the basis `1, X, ..., X^{phi-1}` after `zeta -> 1 + X`.
    /// Only meaningful for prime-power conductors, where the two bases agree
    /// up to a unimodular change of variables.
    pub fn to_x_basis(&self) -> (ZPoly, BigInt) {
        let mut x = poly::shift_by_one(&self.coeffs);
        x.resize(self.coeffs.len(), BigInt::zero());
        (x, self.denominator.clone())
    }

    /// Inverse of `to_x_basis`.
    pub fn from_x_basis(conductor: u64, x_coeffs: &[BigInt], denominator: BigInt) -> Self {
        // substitute X = zeta - 1
        let n = x_coeffs.len();
        let mut out = vec![BigInt::zero(); n.max(1)];
        for coeff in x_coeffs.iter().rev() {
            // out = out * (zeta - 1) + coeff
            let mut next = vec![BigInt::zero(); out.len() + 1];
            for (j, c) in out.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c;
            }
            next[0] += coeff;
            out = next;
        }
        Self::from_raw(conductor, out, denominator)
    }
}

/// A Dirichlet character modulo `p^exponent`, determined by
/// `psi(g) = zeta_{phi(p^exponent)}^index` for the least primitive root `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    p: u64,
    exponent: u32,
    index: u64,
}

/// Discrete-log table for `(Z/p^k)^x` with respect to its least primitive root.
#[derive(Clone, Debug)]
pub struct DiscreteLog {
    modulus: u64,
    order: u64,
    generator: u64,
    table: Vec<u64>,
}

impl DiscreteLog {
    pub fn new(p: u64, k: u32) -> Self {
        let modulus = ipow(p, k);
        let order = phi_prime_power(p, k);
        let generator = primitive_root_prime_power(p, k);
        let mut table = vec![u64::MAX; modulus as usize];
        let mut x = 1u64;
        for t in 0..order {
            table[x as usize] = t;
            x = x * generator % modulus;
        }
        Self { modulus, order, generator, table }
    }

    pub fn log(&self, a: i64) -> Option<u64> {
        let t = self.table[a.rem_euclid(self.modulus as i64) as usize];
        (t != u64::MAX).then_some(t)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }
}

impl DirichletCharacter {
    pub fn new(p: u64, exponent: u32, index: u64) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return Err(invalid!("p must be an odd prime"));
        }
        if exponent == 0 {
            return Err(invalid!("modulus p^0 carries only the trivial character"));
        }
        let order = phi_prime_power(p, exponent);
        Ok(Self { p, exponent, index: index % order })
    }

    pub fn modulus(&self) -> u64 {
        ipow(self.p, self.exponent)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    fn group_order(&self) -> u64 {
        phi_prime_power(self.p, self.exponent)
    }

    pub fn is_primitive(&self) -> bool {
        if self.exponent == 1 {
            self.index != 0
        } else {
            self.index % self.p != 0
        }
    }

    /// Even characters satisfy psi(-1) = 1.
    pub fn is_even(&self) -> bool {
        self.index % 2 == 0
    }

    /// Characters factoring through `Gamma_Cyc` (trivial on the roots of unity).
    pub fn is_wild(&self) -> bool {
        self.index % (self.p - 1) == 0
    }

    pub fn inverse(&self) -> Self {
        let order = self.group_order();
        Self { index: (order - self.index) % order, ..self.clone() }
    }

    /// The conductor of the cyclotomic ring holding both the values and `zeta_{p^e}`.
    pub fn gauss_ring_conductor(&self) -> u64 {
        (self.p - 1) * self.modulus()
    }

    /// Exponent `s` with `psi(a) = zeta_R^s` in the Gauss-sum ring, or `None` if `p | a`.
    pub fn value_exponent(&self, dlog: &DiscreteLog, a: i64) -> Option<u64> {
        let t = dlog.log(a)?;
        let r = self.gauss_ring_conductor();
        // zeta_{phi(p^e)} = zeta_R^p
        Some((self.index * t % self.group_order()) * (r / self.group_order()) % r)
    }

    pub fn value(&self, dlog: &DiscreteLog, a: i64) -> CyclotomicInt {
        let r = self.gauss_ring_conductor();
        match self.value_exponent(dlog, a) {
            Some(s) => CyclotomicInt::zeta_power(r, s as i64),
            None => CyclotomicInt::zero(r),
        }
    }

    /// All characters modulo `p^exponent`.
    pub fn enumerate(p: u64, exponent: u32) -> Result<Vec<Self>> {
        let order = phi_prime_power(p, exponent);
        (0..order).map(|j| Self::new(p, exponent, j)).collect()
    }
}

/// `tau(psi) = sum_a psi(a) zeta_{p^e}^a`, exact in `Z[zeta_{(p-1) p^e}]`.
pub fn gauss_sum(psi: &DirichletCharacter) -> Result<CyclotomicInt> {
    if !psi.is_primitive() {
        return Err(invalid!("Gauss sum requested for a non-primitive character"));
    }
    let dlog = DiscreteLog::new(psi.p, psi.exponent);
    let modulus = psi.modulus();
    let r = psi.gauss_ring_conductor();
    let mut weights = vec![BigInt::zero(); r as usize];
    for a in 1..modulus {
        if let Some(s) = psi.value_exponent(&dlog, a as i64) {
            // zeta_{p^e} = zeta_R^{p-1}
            let e = (s + a * (psi.p - 1)) % r;
            weights[e as usize] += 1;
        }
    }
    Ok(CyclotomicInt::from_exponent_sums(r, weights))
}

/// An element of `Z_p[X] / Phi_{p^k}(1 + X)` with p-adic coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinElement {
    p: u64,
    level: u32,
    coeffs: Vec<PadicScalar>,
}

impl EisensteinElement {
    pub fn new(p: u64, level: u32, coeffs: Vec<PadicScalar>) -> Self {
        let d = phi_prime_power(p, level) as usize;
        assert_eq!(coeffs.len(), d, "Eisenstein element needs phi(p^k) coefficients");
        Self { p, level, coeffs }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len()
    }

    /// Valuation normalized so that v(p) = 1; exact because the basis is
    /// `1, pi, ..., pi^{d-1}` for the uniformizer `pi = X`. `None` when zero
    /// within precision.
    pub fn valuation(&self) -> Option<Ratio<i64>> {
        let d = self.coeffs.len() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| v * d + i as i64))
            .min()
            .map(|num| Ratio::new(num, d))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.level, other.level);
        let d = self.coeffs.len();
        let zero = PadicScalar::exact_zero(self.p);
        let mut prod = vec![zero; 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        let modulus = cyclotomic_poly(self.p, self.level).expect("valid level");
        for top in (d..prod.len()).rev() {
            let c = prod[top].clone();
            for (i, mi) in modulus[..d].iter().enumerate() {
                if !mi.is_zero() {
                    let t = c.mul(&PadicScalar::exact_int(self.p, mi));
                    prod[top - d + i] = prod[top - d + i].sub(&t);
                }
            }
        }
        prod.truncate(d);
        Self { p: self.p, level: self.level, coeffs: prod }
    }

    /// Agreement of every coefficient within the joint precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.agrees_with(b))
    }
}

/// Sends `zeta_{p^k} -> 1 + X` and reduces the coefficients to absolute
/// precision `precision`.
pub fn embed_padic(x: &CyclotomicInt, p: u64, precision: i64) -> Result<EisensteinElement> {
    let m = x.conductor();
    let fac = factor(m);
    if fac.len() != 1 || fac[0].0 != p {
        return Err(invalid!("conductor {m} is not a power of {p}"));
    }
    if precision < 1 {
        return Err(invalid!("precision must be at least 1"));
    }
    let level = fac[0].1;
    let den_val = crate::arith::val_int(x.denominator(), p).unwrap_or(0);
    if den_val >= precision {
        return Err(Error::PrecisionLoss(alloc::format!(
            "denominator divisible by {p}^{den_val}, beyond precision {precision}"
        )));
    }
    let (xc, den) = x.to_x_basis();
    let coeffs = xc
        .iter()
        .map(|c| PadicScalar::from_rational(p, &BigRational::new(c.clone(), den.clone()), precision))
        .collect();
    Ok(EisensteinElement { p, level, coeffs })
}

/// Reduces an exact polynomial in X modulo `Phi_{p^k}(1 + X)` and returns the
/// corresponding element of `Q(zeta_{p^k})`; this is evaluation at `X = zeta - 1`.
pub fn evaluate_at_zeta_minus_one(poly_x: &crate::poly::QPoly, p: u64, k: u32) -> CyclotomicInt {
    let modulus = cyclotomic_poly(p, k).expect("valid level");
    let r = zrem_monic(poly_x.numerators(), &modulus);
    CyclotomicInt::from_x_basis(ipow(p, k), &r, poly_x.denominator().clone())
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    binomial_row(n)[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(3, 1).unwrap(), z(&[3, 3, 1]));
        assert_eq!(cyclotomic_poly(5, 1).unwrap(), z(&[5, 10, 10, 5, 1]));
        let phi9 = cyclotomic_poly(3, 2).unwrap();
        assert_eq!(phi9.len(), 7);
        assert!(phi9[..6].iter().all(|c| (c % BigInt::from(3)).is_zero()));
        assert_eq!(phi9[0], BigInt::from(3));
        assert!(cyclotomic_poly(3, 0).is_err());
        assert!(cyclotomic_poly(9, 1).is_err());
        assert_eq!(cyclotomic_poly_m(6), z(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly_m(12), z(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn exact_ring_arithmetic() {
        let a = CyclotomicInt::zeta_power(9, 2).add(&CyclotomicInt::from_int(9, 5));
        let b = CyclotomicInt::zeta_power(9, 7).sub(&CyclotomicInt::zeta_power(9, 1));
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(CyclotomicInt::zeta_power(9, 9), CyclotomicInt::one(9));
        // zeta_3 satisfies z^2 + z + 1 = 0
        let w = CyclotomicInt::zeta_power(3, 1);
        assert!(w.mul(&w).add(&w).add(&CyclotomicInt::one(3)).is_zero());
    }

    #[test]
    fn inverse_of_zeta_minus_one() {
        for m in [3u64, 9, 27, 6, 18] {
            for e in 1..m as i64 {
                let x = CyclotomicInt::zeta_power(m, e).sub(&CyclotomicInt::one(m));
                if x.is_zero() {
                    continue;
                }
                let inv = CyclotomicInt::inverse_zeta_power_minus_one(m, e).unwrap();
                assert_eq!(x.mul(&inv), CyclotomicInt::one(m), "m={m} e={e}");
            }
        }
    }

    #[test]
    fn quadratic_gauss_sum_mod_three() {
        let chi = DirichletCharacter::new(3, 1, 1).unwrap();
        let tau = gauss_sum(&chi).unwrap();
        let sq = tau.mul(&tau);
        assert_eq!(sq.as_rational(), Some(BigRational::from_integer(BigInt::from(-3))));
    }

    #[test]
    fn non_primitive_gauss_sum_is_rejected() {
        let psi = DirichletCharacter::new(3, 2, 3).unwrap();
        assert!(!psi.is_primitive());
        assert!(gauss_sum(&psi).is_err());
    }

    #[test]
    fn order_three_conductor_nine() {
        // index 2 in a group of order 6: order 3, wild, primitive
        let psi = DirichletCharacter::new(3, 2, 2).unwrap();
        assert!(psi.is_primitive() && psi.is_wild());
        let tau = gauss_sum(&psi).unwrap();
        let abs2 = tau.mul(&tau.conj());
        assert_eq!(abs2.as_rational(), Some(BigRational::from_integer(BigInt::from(9))));
    }

    #[test]
    fn embedding_of_uniformizer_and_integers() {
        let pi = CyclotomicInt::zeta_power(3, 1).sub(&CyclotomicInt::one(3));
        let e = embed_padic(&pi, 3, 10).unwrap();
        assert_eq!(e.valuation(), Some(Ratio::new(1, 2)));
        let three = embed_padic(&CyclotomicInt::from_int(3, 3), 3, 10).unwrap();
        assert_eq!(three.valuation(), Some(Ratio::from_integer(1)));
        let chi = DirichletCharacter::new(3, 1, 1).unwrap();
        let tau = gauss_sum(&chi).unwrap();
        // tau lives in Z[zeta_6] = Z[zeta_3]; zeta_6 = -zeta_3^2
        let tau3 = {
            let (c0, c1) = (tau.coeffs()[0].clone(), tau.coeffs()[1].clone());
            CyclotomicInt::from_int(3, c0).add(&CyclotomicInt::zeta_power(3, 2).scale(&BigRational::from_integer(-c1)))
        };
        assert_eq!(tau3.mul(&tau3).as_rational(), Some(BigRational::from_integer(BigInt::from(-3))));
        let v = embed_padic(&tau3, 3, 10).unwrap().valuation();
        assert_eq!(v, Some(Ratio::new(1, 2)));
    }

    #[test]
    fn embedding_rejects_deep_denominators() {
        let x = CyclotomicInt::from_rational(9, &BigRational::new(BigInt::from(1), BigInt::from(243)));
        assert!(matches!(embed_padic(&x, 3, 5), Err(Error::PrecisionLoss(_))));
        assert!(embed_padic(&x, 3, 6).is_ok());
    }

    #[test]
    fn x_basis_round_trip() {
        let a = CyclotomicInt::zeta_power(27, 5).add(&CyclotomicInt::from_int(27, -4));
        let (x, d) = a.to_x_basis();
        assert_eq!(CyclotomicInt::from_x_basis(27, &x, d), a);
    }
}
