//! Truncated Iwasawa algebras `Z_p[[X]]` and `Z_p[[S, T]]`.
//!
//! A one-variable element stores the coefficients of `X^0..=X^D`, each with
//! its own p-adic precision, and a lower bound `tail` on the valuation of
//! every coefficient past `X^D` (`EXACT` when those are known to vanish).

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::min;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, phi_prime_power};
use crate::cyclotomic::{cyclotomic_poly, EisensteinElement};
use crate::error::{invalid, Error, Result};
use crate::padic::{PadicScalar, EXACT};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwasawaElement1 {
    p: u64,
    coeffs: Vec<PadicScalar>,
    precision: i64,
    tail: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn matches(self, k: u32) -> bool {
        (k % 2 == 0) == (self == Parity::Even)
    }
}

impl IwasawaElement1 {
    /// Zero series at precision `precision` truncated at degree `trunc_degree`.
    pub fn zero(p: u64, precision: i64, trunc_degree: usize) -> Self {
        Self {
            p,
            coeffs: vec![PadicScalar::exact_zero(p); trunc_degree + 1],
            precision,
            tail: EXACT,
        }
    }

    /// A polynomial with rational coefficients reduced to absolute precision.
    /// Fails when the degree exceeds the truncation degree.
    pub fn from_rationals(
        p: u64,
        coeffs: &[BigRational],
        precision: i64,
        trunc_degree: usize,
    ) -> Result<Self> {
        let scalars = coeffs
            .iter()
            .map(|c| PadicScalar::from_rational(p, c, precision))
            .collect::<Vec<_>>();
        Self::from_scalars(p, scalars, precision, trunc_degree)
    }

    pub fn from_ints(p: u64, coeffs: &[i64], precision: i64, trunc_degree: usize) -> Result<Self> {
        let q: Vec<BigRational> =
            coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
        Self::from_rationals(p, &q, precision, trunc_degree)
    }

    pub fn from_bigints(p: u64, coeffs: &[BigInt], precision: i64, trunc_degree: usize) -> Result<Self> {
        let q: Vec<BigRational> = coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        Self::from_rationals(p, &q, precision, trunc_degree)
    }

    pub fn from_scalars(
        p: u64,
        mut coeffs: Vec<PadicScalar>,
        precision: i64,
        trunc_degree: usize,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(invalid!("{p} is not prime"));
        }
        while coeffs.len() > trunc_degree + 1 {
            let c = coeffs.pop().unwrap();
            if !c.is_zero() {
                return Err(Error::TruncationInsufficient(alloc::format!(
                    "polynomial of degree {} exceeds truncation degree {trunc_degree}",
                    coeffs.len()
                )));
            }
        }
        coeffs.resize(trunc_degree + 1, PadicScalar::exact_zero(p));
        let coeffs = coeffs.into_iter().map(|c| c.with_absolute(precision)).collect();
        Ok(Self { p, coeffs, precision, tail: EXACT })
    }

    /// Builds a power series whose coefficients beyond `D` are only known to
    /// have valuation at least `tail`.
    pub fn with_tail(mut self, tail: i64) -> Self {
        self.tail = min(self.tail, tail);
        self
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail(&self) -> i64 {
        self.tail
    }

    pub fn is_polynomial(&self) -> bool {
        self.tail == EXACT
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicScalar {
        match self.coeffs.get(i) {
            Some(c) => c.clone(),
            None if self.tail == EXACT => PadicScalar::exact_zero(self.p),
            None => PadicScalar::zero_within(self.p, self.tail),
        }
    }

    /// Highest index with a nonzero known coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero_within_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lower bound for the valuation of every coefficient, including the tail.
    pub fn valuation_bound(&self) -> i64 {
        self.coeffs.iter().map(|c| c.valuation_bound()).fold(self.tail, min)
    }

    /// Re-truncates at a new degree; dropped coefficients feed the tail bound.
    pub fn truncate(&self, trunc_degree: usize) -> Self {
        let mut out = self.clone();
        if trunc_degree + 1 < out.coeffs.len() {
            let dropped = out.coeffs.split_off(trunc_degree + 1);
            for c in dropped {
                out.tail = min(out.tail, c.valuation_bound());
            }
        } else {
            let pad = if out.tail == EXACT {
                PadicScalar::exact_zero(self.p)
            } else {
                PadicScalar::zero_within(self.p, out.tail)
            };
            out.coeffs.resize(trunc_degree + 1, pad);
        }
        out
    }

    /// Lowers the coefficient precision to `precision`.
    pub fn with_precision(&self, precision: i64) -> Self {
        let mut out = self.clone();
        out.precision = min(self.precision, precision);
        for c in &mut out.coeffs {
            *c = c.with_absolute(out.precision);
        }
        if out.tail != EXACT {
            out.tail = min(out.tail, out.precision);
        }
        out
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "mixing primes");
        let d = min(self.trunc_degree(), other.trunc_degree());
        (self.truncate(d), other.truncate(d))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self {
            p: self.p,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect(),
            precision: min(a.precision, b.precision),
            tail: min(a.tail, b.tail),
        }
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        let coeffs: Vec<PadicScalar> = self.coeffs.iter().map(|c| c.mul(s)).collect();
        let tail = if self.tail == EXACT {
            EXACT
        } else {
            self.tail.saturating_add(s.valuation_bound().min(self.precision))
        };
        Self { coeffs, tail, ..self.clone() }
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.shift(k)).collect(),
            tail: if self.tail == EXACT { EXACT } else { self.tail + k },
            precision: self.precision + k,
            ..self.clone()
        }
    }

    /// Product truncated at the smaller truncation degree.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let d = a.trunc_degree();
        let zero = PadicScalar::exact_zero(self.p);
        let mut coeffs = vec![zero; d + 1];
        let mut dropped = EXACT;
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_exact_zero() {
                continue;
            }
            for (j, cb) in b.coeffs.iter().enumerate() {
                if cb.is_exact_zero() {
                    continue;
                }
                let t = ca.mul(cb);
                if i + j <= d {
                    coeffs[i + j] = coeffs[i + j].add(&t);
                } else {
                    dropped = min(dropped, t.valuation_bound());
                }
            }
        }
        let mut tail = dropped;
        if a.tail != EXACT || b.tail != EXACT {
            let va = a.valuation_bound();
            let vb = b.valuation_bound();
            tail = min(tail, va.saturating_add(vb));
        }
        Self { p: self.p, coeffs, precision: min(a.precision, b.precision), tail }
    }

    /// Inverse of a unit power series (constant term a p-adic unit).
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if !c0.is_unit() {
            return Err(invalid!("constant term is not a p-adic unit"));
        }
        let inv0 = c0.inverse()?.with_absolute(self.precision);
        let d = self.trunc_degree();
        let mut out: Vec<PadicScalar> = Vec::with_capacity(d + 1);
        out.push(inv0.clone());
        for k in 1..=d {
            let mut acc = PadicScalar::exact_zero(self.p);
            for j in 1..=k {
                if !self.coeffs[j].is_exact_zero() {
                    acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out.push(acc.mul(&inv0).neg());
        }
        let vb = self.valuation_bound();
        let tail = if self.is_polynomial() && self.degree() == Some(0) {
            EXACT
        } else {
            min(0, vb)
        };
        Ok(Self { p: self.p, coeffs: out, precision: self.precision, tail })
    }

    /// Evaluates at `X = zeta_{p^k} - 1`, i.e. reduces modulo `Phi_{p^k}(1 + X)`.
    /// Unknown tail coefficients lower the precision of the result.
    pub fn eval_at_level(&self, k: u32) -> Result<EisensteinElement> {
        let modulus = cyclotomic_poly(self.p, k)?;
        let d = modulus.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() < d {
            r.resize(d, PadicScalar::exact_zero(self.p));
        }
        let support: Vec<(usize, PadicScalar)> = modulus[..d]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, PadicScalar::exact_int(self.p, c)))
            .collect();
        for top in (d..r.len()).rev() {
            let c = core::mem::replace(&mut r[top], PadicScalar::exact_zero(self.p));
            if c.is_exact_zero() {
                continue;
            }
            for (i, mi) in &support {
                let idx = top - d + i;
                r[idx] = r[idx].sub(&c.mul(mi));
            }
        }
        r.truncate(d);
        if self.tail != EXACT {
            for c in &mut r {
                *c = c.with_absolute(self.tail);
            }
        }
        Ok(EisensteinElement::new(self.p, k, r))
    }

    /// Exact rational representatives of the known coefficients.
    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| c.to_rational()).collect()
    }

    /// Coefficient-wise agreement within the joint precision, up to the
    /// shared truncation degree.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| x.agrees_with(y))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slope {
    pub count: usize,
    pub valuation: Ratio<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub mu: i64,
    pub lambda: usize,
    pub slopes: Vec<Slope>,
    pub stabilized: bool,
}

impl InvariantProfile {
    /// Same (mu, lambda, slopes), ignoring the stabilization flag.
    pub fn same_invariants(&self, other: &Self) -> bool {
        self.mu == other.mu && self.lambda == other.lambda && self.slopes == other.slopes
    }

    pub fn is_unit(&self) -> bool {
        self.mu == 0 && self.lambda == 0
    }

    /// Distinct slope values.
    pub fn slope_values(&self) -> Vec<Ratio<i64>> {
        self.slopes.iter().map(|s| s.valuation).collect()
    }

    /// Root valuations with multiplicity, steepest first.
    pub fn root_valuations(&self) -> Vec<Ratio<i64>> {
        self.slopes
            .iter()
            .flat_map(|s| core::iter::repeat(s.valuation).take(s.count))
            .collect()
    }

    pub fn from_root_valuations(mu: i64, roots: &[Ratio<i64>], stabilized: bool) -> Self {
        let mut sorted = roots.to_vec();
        sorted.sort_by(|a, b| b.cmp(a));
        let mut slopes: Vec<Slope> = Vec::new();
        for r in sorted {
            match slopes.last_mut() {
                Some(s) if s.valuation == r => s.count += 1,
                _ => slopes.push(Slope { count: 1, valuation: r }),
            }
        }
        Self { mu, lambda: roots.len(), slopes, stabilized }
    }
}

/// Lower convex hull of points sorted by abscissa. Collinear interior points
/// are dropped so each returned segment has a distinct slope.
pub fn lower_hull(points: &[(i64, Ratio<i64>)]) -> Vec<(i64, Ratio<i64>)> {
    let mut hull: Vec<(i64, Ratio<i64>)> = Vec::new();
    for &(x, y) in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2, y2) unless it lies strictly below the chord
            let lhs = (y2 - y1) * Ratio::from_integer(x - x1);
            let rhs = (y - y1) * Ratio::from_integer(x2 - x1);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

/// Value at `x` of the piecewise linear function through the hull vertices.
pub fn hull_value(hull: &[(i64, Ratio<i64>)], x: i64) -> Ratio<i64> {
    for w in hull.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        if x1 <= x && x <= x2 {
            return y1 + (y2 - y1) * Ratio::new(x - x1, x2 - x1);
        }
    }
    hull.last().map(|h| h.1).unwrap_or_else(Ratio::zero)
}

/// mu, lambda and the Newton-polygon slope profile of `f`.
pub fn newton_invariants(f: &IwasawaElement1) -> Result<InvariantProfile> {
    let known: Vec<(usize, i64)> = f
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i, v)))
        .collect();
    let Some(mu) = known.iter().map(|&(_, v)| v).min() else {
        return Err(Error::PrecisionInsufficient(
            "every coefficient is zero within precision".into(),
        ));
    };
    let lambda = known.iter().find(|&&(_, v)| v == mu).unwrap().0;
    for (i, c) in f.coeffs.iter().enumerate() {
        if c.is_zero() && !c.is_exact_zero() {
            let b = c.valuation_bound();
            if b < mu || (b == mu && i < lambda) {
                return Err(Error::PrecisionInsufficient(alloc::format!(
                    "coefficient {i} is unknown below valuation {mu}"
                )));
            }
        }
    }
    if f.tail < mu {
        return Err(Error::TruncationInsufficient(alloc::format!(
            "unknown coefficients past degree {} may have valuation below {mu}",
            f.trunc_degree()
        )));
    }

    let mut points: Vec<(i64, Ratio<i64>)> = Vec::new();
    let head_known = f.coeffs[0].valuation().is_some() || f.coeffs[0].is_exact_zero();
    if !head_known {
        points.push((0, Ratio::from_integer(f.coeffs[0].valuation_bound() - mu)));
    }
    for &(i, v) in &known {
        if i > lambda {
            break;
        }
        points.push((i as i64, Ratio::from_integer(v - mu)));
    }
    points.dedup_by_key(|p| p.0);
    let hull = lower_hull(&points);

    let mut stabilized = head_known;
    if f.coeffs[0].is_exact_zero() && lambda > 0 {
        // X divides f exactly: the root 0 has infinite valuation, which the
        // profile cannot express
        stabilized = false;
    }
    for (i, c) in f.coeffs.iter().enumerate().take(lambda + 1) {
        if c.is_zero() && !c.is_exact_zero() {
            let b = Ratio::from_integer(c.valuation_bound() - mu);
            if b < hull_value(&hull, i as i64) {
                stabilized = false;
            }
        }
    }

    let mut slopes: Vec<Slope> = Vec::new();
    for w in hull.windows(2) {
        let ((x1, y1), (x2, y2)) = (w[0], w[1]);
        let s = (y1 - y2) / Ratio::from_integer(x2 - x1);
        slopes.push(Slope { count: (x2 - x1) as usize, valuation: s });
    }
    Ok(InvariantProfile { mu, lambda, slopes, stabilized })
}

/// Result of `f = p^mu * unit * distinguished`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weierstrass {
    pub mu: i64,
    pub unit: IwasawaElement1,
    /// Monic of degree lambda, stored as a polynomial element.
    pub distinguished: IwasawaElement1,
}

/// Weierstrass preparation by division of `X^lambda` by `f / p^mu`:
/// `X^lambda = q f' + r` gives `P = X^lambda - r = q f'` and `unit = q^{-1}`.
pub fn weierstrass_prepare(f: &IwasawaElement1) -> Result<Weierstrass> {
    let profile = newton_invariants(f)?;
    let (mu, lambda) = (profile.mu, profile.lambda);
    let d = f.trunc_degree();
    if lambda >= d {
        return Err(Error::TruncationInsufficient(alloc::format!(
            "lambda = {lambda} needs truncation degree above {d}"
        )));
    }
    if mu >= f.precision {
        return Err(Error::TruncationInsufficient(alloc::format!(
            "mu = {mu} reaches the coefficient precision {}",
            f.precision
        )));
    }
    let p = f.p;
    let fp = f.shift(-mu).with_precision(f.precision - mu);
    let n = fp.precision;
    // f' = A + X^lambda B with A in p Z_p[X]
    let mut a = fp.truncate(d);
    for c in a.coeffs.iter_mut().skip(lambda) {
        *c = PadicScalar::exact_zero(p);
    }
    a.tail = EXACT;
    let b = drop_low(&fp, lambda);
    let b_inv = b.inverse()?;

    let mut q = IwasawaElement1::zero(p, n, d);
    let mut r = IwasawaElement1::zero(p, n, d);
    r.coeffs[lambda] = PadicScalar::from_int(p, 1, n);
    for _ in 0..=(n as usize + 1) {
        let high = drop_low(&r, lambda);
        if high.is_zero_within_precision() && high.tail >= n {
            break;
        }
        let t = high.mul(&b_inv);
        q = q.add(&t);
        let mut low = r.clone();
        for c in low.coeffs.iter_mut().skip(lambda) {
            *c = PadicScalar::exact_zero(p);
        }
        low.tail = EXACT;
        r = low.sub(&t.mul(&a));
    }
    let high = drop_low(&r, lambda);
    if !(high.is_zero_within_precision() && high.tail >= n) {
        return Err(Error::PrecisionInsufficient(
            "Weierstrass division did not converge within precision".into(),
        ));
    }
    let mut dist = vec![PadicScalar::exact_zero(p); lambda + 1];
    for (i, c) in dist.iter_mut().enumerate().take(lambda) {
        *c = r.coeffs[i].neg();
    }
    dist[lambda] = PadicScalar::from_int(p, 1, n);
    let distinguished = IwasawaElement1::from_scalars(p, dist, n, d)?;
    let unit = q.inverse()?;
    Ok(Weierstrass { mu, unit, distinguished })
}

/// `(f - (f mod X^k)) / X^k`, keeping the truncation degree; the vacated
/// top coefficients become `O(p^tail)`.
fn drop_low(f: &IwasawaElement1, k: usize) -> IwasawaElement1 {
    let d = f.trunc_degree();
    let fill = if f.tail == EXACT {
        PadicScalar::exact_zero(f.p)
    } else {
        PadicScalar::zero_within(f.p, f.tail)
    };
    let mut coeffs: Vec<PadicScalar> = f.coeffs[k.min(d + 1)..].to_vec();
    coeffs.resize(d + 1, fill);
    IwasawaElement1 { p: f.p, coeffs, precision: f.precision, tail: f.tail }
}

/// `omega_n^{parity} = prod_{1 <= k <= n, k of the given parity} Phi_{p^k}(1 + X)`
/// as an exact integer polynomial.
pub fn half_log_product_exact(p: u64, parity: Parity, n: u32) -> Result<Vec<BigInt>> {
    if n == 0 {
        return Err(invalid!("n must be at least 1"));
    }
    let mut acc = vec![BigInt::one()];
    for k in 1..=n {
        if parity.matches(k) {
            acc = crate::poly::zmul(&acc, &cyclotomic_poly(p, k)?);
        }
    }
    Ok(acc)
}

pub fn half_log_product(
    p: u64,
    parity: Parity,
    n: u32,
    precision: i64,
    trunc_degree: usize,
) -> Result<IwasawaElement1> {
    let w = half_log_product_exact(p, parity, n)?;
    IwasawaElement1::from_bigints(p, &w, precision, trunc_degree)
}

pub fn half_log_degree(p: u64, parity: Parity, n: u32) -> usize {
    (1..=n).filter(|&k| parity.matches(k)).map(|k| phi_prime_power(p, k) as usize).sum()
}

/// Truncated Pollack logarithm: `(1/p) prod Phi_{p^k}(1 + X) / p` over even
/// (sign +) or odd (sign -) `k <= n_max`.
pub fn pollack_log_truncated(
    p: u64,
    sign: Sign,
    n_max: u32,
    trunc_degree: usize,
    precision: i64,
) -> Result<IwasawaElement1> {
    if n_max == 0 {
        return Err(invalid!("n_max must be at least 1"));
    }
    let parity = match sign {
        Sign::Plus => Parity::Even,
        Sign::Minus => Parity::Odd,
    };
    let factors = (1..=n_max).filter(|&k| parity.matches(k)).count() as u32;
    let w = half_log_product_exact(p, parity, n_max)?;
    if w.len() - 1 > trunc_degree {
        return Err(Error::TruncationInsufficient(alloc::format!(
            "log has degree {} above truncation {trunc_degree}",
            w.len() - 1
        )));
    }
    let den = crate::arith::big_pow(p, factors + 1);
    let q: Vec<BigRational> = w.into_iter().map(|c| BigRational::new(c, den.clone())).collect();
    IwasawaElement1::from_rationals(p, &q, precision, trunc_degree)
}

/// Element of `Z_p[[S, T]]` truncated at degree `D` in each variable.
/// `coeffs[i][j]` is the coefficient of `S^i T^j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IwasawaElement2 {
    p: u64,
    coeffs: Vec<Vec<PadicScalar>>,
    precision: i64,
    tail: i64,
}

impl IwasawaElement2 {
    pub fn zero(p: u64, precision: i64, trunc_degree: usize) -> Self {
        Self {
            p,
            coeffs: vec![vec![PadicScalar::exact_zero(p); trunc_degree + 1]; trunc_degree + 1],
            precision,
            tail: EXACT,
        }
    }

    /// From sparse integer terms `(i, j, c)` meaning `c S^i T^j`.
    pub fn from_terms(
        p: u64,
        terms: &[(usize, usize, i64)],
        precision: i64,
        trunc_degree: usize,
    ) -> Result<Self> {
        let mut out = Self::zero(p, precision, trunc_degree);
        for &(i, j, c) in terms {
            if i > trunc_degree || j > trunc_degree {
                return Err(Error::TruncationInsufficient(alloc::format!(
                    "term S^{i} T^{j} beyond truncation degree {trunc_degree}"
                )));
            }
            let add = PadicScalar::from_int(p, c, precision);
            out.coeffs[i][j] = out.coeffs[i][j].add(&add);
        }
        Ok(out)
    }

    pub fn from_scalars(p: u64, coeffs: Vec<Vec<PadicScalar>>, precision: i64) -> Result<Self> {
        let d = coeffs.len();
        if d == 0 || coeffs.iter().any(|row| row.len() != d) {
            return Err(invalid!("coefficient matrix must be square and nonempty"));
        }
        let coeffs = coeffs
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.with_absolute(precision)).collect())
            .collect();
        Ok(Self { p, coeffs, precision, tail: EXACT })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize, j: usize) -> &PadicScalar {
        &self.coeffs[i][j]
    }

    pub fn coeffs(&self) -> &[Vec<PadicScalar>] {
        &self.coeffs
    }

    pub fn tail(&self) -> i64 {
        self.tail
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = min(self.trunc_degree(), other.trunc_degree());
        let coeffs = (0..=d)
            .map(|i| (0..=d).map(|j| self.coeffs[i][j].add(&other.coeffs[i][j])).collect())
            .collect();
        Self {
            p: self.p,
            coeffs,
            precision: min(self.precision, other.precision),
            tail: min(self.tail, other.tail),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|r| r.iter().map(|c| c.neg()).collect()).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn valuation_bound(&self) -> i64 {
        self.coeffs.iter().flatten().map(|c| c.valuation_bound()).fold(self.tail, min)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = min(self.trunc_degree(), other.trunc_degree());
        let mut out = Self::zero(self.p, min(self.precision, other.precision), d);
        let mut dropped = EXACT;
        for i1 in 0..=d {
            for j1 in 0..=d {
                let a = &self.coeffs[i1][j1];
                if a.is_exact_zero() {
                    continue;
                }
                for i2 in 0..=d {
                    for j2 in 0..=d {
                        let b = &other.coeffs[i2][j2];
                        if b.is_exact_zero() {
                            continue;
                        }
                        let t = a.mul(b);
                        if i1 + i2 <= d && j1 + j2 <= d {
                            let c = &mut out.coeffs[i1 + i2][j1 + j2];
                            *c = c.add(&t);
                        } else {
                            dropped = min(dropped, t.valuation_bound());
                        }
                    }
                }
            }
        }
        out.tail = dropped;
        if self.tail != EXACT || other.tail != EXACT {
            out.tail = min(out.tail, self.valuation_bound().saturating_add(other.valuation_bound()));
        }
        out
    }

    /// Coefficients of `T^j` as series in `S` (the T-polynomial presentation).
    pub fn t_coefficients(&self) -> Vec<IwasawaElement1> {
        let d = self.trunc_degree();
        (0..=d)
            .map(|j| IwasawaElement1 {
                p: self.p,
                coeffs: (0..=d).map(|i| self.coeffs[i][j].clone()).collect(),
                precision: self.precision,
                tail: self.tail,
            })
            .collect()
    }

    /// Swaps the roles of S and T.
    pub fn swap_variables(&self) -> Self {
        let d = self.trunc_degree();
        let coeffs = (0..=d).map(|i| (0..=d).map(|j| self.coeffs[j][i].clone()).collect()).collect();
        Self { coeffs, ..self.clone() }
    }

    /// Reduction mod p as a matrix of residues in `0..p`.
    pub fn residues_mod_p(&self) -> Vec<Vec<u64>> {
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|c| residue_mod_p(c)).collect())
            .collect()
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        let d = min(self.trunc_degree(), other.trunc_degree());
        (0..=d).all(|i| (0..=d).all(|j| self.coeffs[i][j].agrees_with(&other.coeffs[i][j])))
    }
}

/// The residue of an integral scalar modulo p.
pub fn residue_mod_p(c: &PadicScalar) -> u64 {
    match c.valuation() {
        Some(0) => {
            let p = BigInt::from(c.prime());
            let r = c.unit_part() % &p;
            let r = if r < BigInt::zero() { r + p } else { r };
            u64::try_from(r).unwrap()
        }
        _ => 0,
    }
}

/// Cyclotomic specialization `S -> X, T -> X`.
pub fn pi_cyc(f: &IwasawaElement2) -> IwasawaElement1 {
    let d = f.trunc_degree();
    let mut coeffs = vec![PadicScalar::exact_zero(f.p); d + 1];
    let mut tail = f.tail;
    for i in 0..=d {
        for j in 0..=d {
            let c = &f.coeffs[i][j];
            if c.is_exact_zero() {
                continue;
            }
            if i + j <= d {
                coeffs[i + j] = coeffs[i + j].add(c);
            } else {
                tail = min(tail, c.valuation_bound());
            }
        }
    }
    IwasawaElement1 { p: f.p, coeffs, precision: f.precision, tail }
}

/// T-degree: highest j whose S-series is nonzero within precision.
fn t_degree(cols: &[IwasawaElement1]) -> Option<usize> {
    cols.iter().rposition(|c| !c.is_zero_within_precision())
}

/// Sylvester resultant in T with coefficients in truncated `Z_p[[S]]`,
/// via the division-free Berkowitz-Bird determinant.
pub fn resultant_in_t(f: &IwasawaElement2, g: &IwasawaElement2) -> Result<IwasawaElement1> {
    let fc = f.t_coefficients();
    let gc = g.t_coefficients();
    // the leading T-coefficients need not be monic, only nonzero within precision
    let (Some(m), Some(n)) = (t_degree(&fc), t_degree(&gc)) else {
        return Err(Error::PrecisionLoss("a generator is zero within precision".into()));
    };
    let d = min(f.trunc_degree(), g.trunc_degree());
    let size = m + n;
    let zero = IwasawaElement1::zero(f.p, min(f.precision, g.precision), d);
    if size == 0 {
        return Ok(zero.add(&IwasawaElement1::from_ints(f.p, &[1], zero.precision, d)?));
    }
    let mut mat = vec![vec![zero.clone(); size]; size];
    // rows 0..n: shifts of f (highest degree first); rows n..n+m: shifts of g
    for r in 0..n {
        for k in 0..=m {
            mat[r][r + k] = fc[m - k].truncate(d);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            mat[n + r][r + k] = gc[n - k].truncate(d);
        }
    }
    Ok(bird_determinant(&mat))
}

/// Bird's division-free determinant (2011) over a commutative ring.
pub fn bird_determinant(a: &[Vec<IwasawaElement1>]) -> IwasawaElement1 {
    let n = a.len();
    let zero = a[0][0].sub(&a[0][0]);
    let mut x: Vec<Vec<IwasawaElement1>> = a.to_vec();
    for _ in 1..n {
        // mu(X): zero below the diagonal, negated trailing sums on the diagonal
        let mut m = vec![vec![zero.clone(); n]; n];
        let mut acc = zero.clone();
        for i in (0..n).rev() {
            m[i][i] = acc.neg();
            acc = acc.add(&x[i][i]);
            for j in i + 1..n {
                m[i][j] = x[i][j].clone();
            }
        }
        let mut next = vec![vec![zero.clone(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = zero.clone();
                for (k, row) in a.iter().enumerate() {
                    if m[i][k].is_zero_within_precision() && m[i][k].is_polynomial() {
                        continue;
                    }
                    s = s.add(&m[i][k].mul(&row[j]));
                }
                next[i][j] = s;
            }
        }
        x = next;
    }
    if n % 2 == 0 {
        x[0][0].neg()
    } else {
        x[0][0].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(c: &[i64]) -> IwasawaElement1 {
        IwasawaElement1::from_ints(3, c, 30, 40).unwrap()
    }

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn unit_and_eisenstein_profiles() {
        let u = newton_invariants(&el(&[1, 3])).unwrap();
        assert_eq!((u.mu, u.lambda, u.slopes.len()), (0, 0, 0));
        let e = newton_invariants(&el(&[-3, 0, 1])).unwrap();
        assert_eq!(e.lambda, 2);
        assert_eq!(e.slopes, vec![Slope { count: 2, valuation: r(1, 2) }]);
        assert!(e.stabilized);
    }

    #[test]
    fn half_log_products() {
        let w = half_log_product(3, Parity::Even, 2, 30, 10).unwrap();
        assert_eq!(w.degree(), Some(6));
        assert_eq!(half_log_degree(3, Parity::Odd, 3), 20);
        let w4 = half_log_product(3, Parity::Even, 4, 30, 60).unwrap();
        let prof = newton_invariants(&w4).unwrap();
        assert_eq!(
            prof.slopes,
            vec![Slope { count: 6, valuation: r(1, 6) }, Slope { count: 54, valuation: r(1, 54) }]
        );
    }

    #[test]
    fn pollack_logs_and_vanishing() {
        let lm = pollack_log_truncated(3, Sign::Minus, 1, 10, 20).unwrap();
        let expect = IwasawaElement1::from_rationals(
            3,
            &[r(3, 9), r(3, 9), r(1, 9)]
                .iter()
                .map(|q| BigRational::new((*q.numer()).into(), (*q.denom()).into()))
                .collect::<Vec<_>>(),
            20,
            10,
        )
        .unwrap();
        assert!(lm.agrees_with(&expect));
        let lm3 = pollack_log_truncated(3, Sign::Minus, 3, 30, 20).unwrap();
        assert!(lm3.eval_at_level(1).unwrap().is_zero());
        assert!(!lm3.eval_at_level(2).unwrap().is_zero());
        assert!(lm3.eval_at_level(3).unwrap().is_zero());
        let lp = pollack_log_truncated(3, Sign::Plus, 3, 30, 20).unwrap();
        assert!(lp.eval_at_level(2).unwrap().is_zero());
        assert!(!lp.eval_at_level(1).unwrap().is_zero());
        assert!(pollack_log_truncated(3, Sign::Plus, 4, 30, 20).is_err());
    }

    #[test]
    fn preparation_recovers_factors() {
        let f = el(&[3]).mul(&el(&[1, 1])).mul(&el(&[3, 0, 1]));
        let w = weierstrass_prepare(&f).unwrap();
        assert_eq!(w.mu, 1);
        assert!(w.distinguished.agrees_with(&el(&[3, 0, 1])));
        assert!(w.unit.agrees_with(&el(&[1, 1])));

        let phi9 = IwasawaElement1::from_bigints(3, &cyclotomic_poly(3, 2).unwrap(), 30, 40).unwrap();
        let g = phi9.mul(&el(&[1, 3]));
        let wg = weierstrass_prepare(&g).unwrap();
        assert_eq!(wg.mu, 0);
        assert!(wg.distinguished.agrees_with(&phi9));

        let u = el(&[2, 5, 7]);
        let wu = weierstrass_prepare(&u).unwrap();
        assert!(wu.distinguished.agrees_with(&el(&[1])));
        assert!(wu.unit.agrees_with(&u));
    }

    #[test]
    fn preparation_of_a_power_series() {
        // (X^2 - 3) times the power series 1/(1 - X), truncated
        let geom = el(&[1, -1]).inverse().unwrap();
        assert!(!geom.is_polynomial());
        let f = el(&[-3, 0, 1]).mul(&geom);
        let w = weierstrass_prepare(&f).unwrap();
        assert!(w.distinguished.agrees_with(&el(&[-3, 0, 1])));
        let back = w.unit.mul(&w.distinguished);
        assert!(back.agrees_with(&f));
    }

    #[test]
    fn truncation_errors() {
        let f = IwasawaElement1::from_ints(3, &[3, 3, 3, 1], 30, 3).unwrap();
        assert!(matches!(weierstrass_prepare(&f), Err(Error::TruncationInsufficient(_))));
        let z = IwasawaElement1::zero(3, 10, 5);
        assert!(matches!(newton_invariants(&z), Err(Error::PrecisionInsufficient(_))));
    }

    #[test]
    fn resultant_examples() {
        let f = IwasawaElement2::from_terms(3, &[(0, 1, 1), (1, 0, -1)], 20, 6).unwrap();
        let g = IwasawaElement2::from_terms(3, &[(0, 1, 1), (1, 0, -1), (0, 0, -3)], 20, 6).unwrap();
        let res = resultant_in_t(&f, &g).unwrap();
        assert!(res.agrees_with(&IwasawaElement1::from_ints(3, &[-3], 20, 6).unwrap()));
        let res_rev = resultant_in_t(&g, &f).unwrap();
        assert!(res_rev.agrees_with(&IwasawaElement1::from_ints(3, &[3], 20, 6).unwrap()));
        assert!(resultant_in_t(&f, &f).unwrap().is_zero_within_precision());

        let f2 = IwasawaElement2::from_terms(3, &[(0, 2, 1), (1, 0, -1)], 20, 6).unwrap();
        let res2 = resultant_in_t(&f2, &f).unwrap();
        assert!(res2.agrees_with(&IwasawaElement1::from_ints(3, &[0, -1, 1], 20, 6).unwrap()));
    }

    #[test]
    fn cyclotomic_specialization() {
        let one_s = IwasawaElement2::from_terms(3, &[(0, 0, 1), (1, 0, 1)], 20, 4).unwrap();
        let one_t = IwasawaElement2::from_terms(3, &[(0, 0, 1), (0, 1, 1)], 20, 4).unwrap();
        let prod = pi_cyc(&one_s.mul(&one_t));
        assert!(prod.agrees_with(&IwasawaElement1::from_ints(3, &[1, 2, 1], 20, 4).unwrap()));
        assert!(pi_cyc(&one_s.sub(&one_t)).is_zero_within_precision());
        let st = IwasawaElement2::from_terms(3, &[(1, 1, 1)], 20, 4).unwrap();
        assert!(pi_cyc(&st).agrees_with(&IwasawaElement1::from_ints(3, &[0, 0, 1], 20, 4).unwrap()));
    }

    #[test]
    fn hull_merges_collinear_points() {
        let pts = [(0, r(2, 1)), (1, r(1, 1)), (2, r(0, 1))];
        assert_eq!(lower_hull(&pts), vec![(0, r(2, 1)), (2, r(0, 1))]);
    }
}
