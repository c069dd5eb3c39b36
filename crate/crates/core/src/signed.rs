//! Mazur-Tate elements and the signed p-adic L-functions of a supersingular
//! curve (or one of its quadratic twists), reconstructed by interpolation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ipow, is_prime, phi_prime_power, primitive_root_prime_power};
use crate::cyclotomic::{cyclotomic_poly, CyclotomicInt};
use crate::error::{invalid, Error, Result};
use crate::iwasawa::{newton_invariants, InvariantProfile, IwasawaElement1, Parity, Sign};
use crate::modsym::curve::CurveData;
use crate::modsym::symbol::TwistedSymbol;

/// Which symbol a Mazur-Tate element was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub label: String,
    pub discriminant: i64,
    pub symbol_sign: Sign,
}

/// `theta_n = sum_{a mod p^{n+1}} [a/p^{n+1}] sigma_a` pushed to `Gamma_n`: the
/// coefficient at `j` sums the symbol over the `p - 1` units `a` with
/// `<a> = gamma^j`, `gamma = 1 + p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazurTateElement {
    pub p: u64,
    pub level: u32,
    pub coeffs: Vec<i64>,
    pub provenance: Provenance,
}

/// Checks the standing hypotheses: `p` odd, good reduction at `p`, `a_p = 0`.
pub fn check_supersingular(curve: &CurveData, p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(invalid!("p = {p} must be an odd prime"));
    }
    if curve.conductor % p == 0 {
        return Err(Error::BadReduction { ell: p });
    }
    let ap = curve.count_points(p)?;
    if ap != 0 {
        return Err(Error::UnsupportedHypothesis(format!("a_{p} = {ap} is not zero")));
    }
    Ok(())
}

/// The units `a mod p^{n+1}` paired with their `Gamma_n` index `j`, in
/// order of `j`.
pub fn birch_points(p: u64, n: u32) -> Vec<(i64, usize)> {
    let modulus = ipow(p, n + 1) as u128;
    let order = ipow(p, n) as usize;
    let g = primitive_root_prime_power(p, n + 1) as u128;
    // Teichmueller lifts of (Z/p)^x: powers of g^{p^n}
    let w = pow_u128(g, ipow(p, n) as u128, modulus);
    let mut teich = Vec::with_capacity(p as usize - 1);
    let mut t = 1u128;
    for _ in 0..p - 1 {
        teich.push(t);
        t = t * w % modulus;
    }
    let gamma = (1 + p) as u128 % modulus;
    let mut out = Vec::with_capacity(order * (p as usize - 1));
    let mut x = 1u128;
    for j in 0..order {
        for &t in &teich {
            out.push(((t * x % modulus) as i64, j));
        }
        x = x * gamma % modulus;
    }
    out
}

fn pow_u128(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

impl MazurTateElement {
    /// Assembles the element from values of the symbol at `a / p^{n+1}` for
    /// each entry of `birch_points(p, n)`.
    pub fn from_point_values(
        p: u64,
        n: u32,
        points: &[(i64, usize)],
        values: &[i64],
        provenance: Provenance,
    ) -> Result<Self> {
        if points.len() != values.len() {
            return Err(invalid!("{} points but {} values", points.len(), values.len()));
        }
        let mut coeffs = vec![0i64; ipow(p, n) as usize];
        for (&(_, j), &v) in points.iter().zip(values) {
            coeffs[j] = coeffs[j]
                .checked_add(v)
                .ok_or_else(|| Error::Resource("Mazur-Tate coefficient overflows i64".into()))?;
        }
        Ok(Self { p, level: n, coeffs, provenance })
    }

    /// `psi(theta_n)` for the character with `psi(gamma) = zeta_{p^n}^index`.
    pub fn character_value(&self, index: u64) -> CyclotomicInt {
        let m = ipow(self.p, self.level);
        let mut w = vec![BigInt::zero(); m as usize];
        for (j, &c) in self.coeffs.iter().enumerate() {
            w[((index as u128 * j as u128) % m as u128) as usize] += c;
        }
        CyclotomicInt::from_exponent_sums(m, w)
    }
}

/// Mazur-Tate element of level `n` for a (possibly twisted) symbol of the
/// curve; the symbol's sign is recorded in the provenance.
pub fn mazur_tate(curve: &CurveData, symbol: &TwistedSymbol, p: u64, n: u32) -> Result<MazurTateElement> {
    check_supersingular(curve, p)?;
    if n == 0 {
        return Err(invalid!("level must be at least 1"));
    }
    let m = ipow(p, n + 1) as i64;
    let points = birch_points(p, n);
    let values = points.iter().map(|&(a, _)| symbol.value_int(a, m)).collect::<Result<Vec<_>>>()?;
    let provenance = Provenance {
        label: curve.label.clone(),
        discriminant: symbol.discriminant,
        symbol_sign: symbol.sign,
    };
    MazurTateElement::from_point_values(p, n, &points, &values, provenance)
}

/// Levels at which `theta^sign` is interpolated: odd for `+`, even for `-`.
pub fn interpolation_parity(sign: Sign) -> Parity {
    match sign {
        Sign::Plus => Parity::Odd,
        Sign::Minus => Parity::Even,
    }
}

/// The sign in front of the Birch sum at level `m`.
pub fn interpolation_sign(sign: Sign, m: u32) -> i64 {
    let e = match sign {
        Sign::Plus => (m + 1) / 2,
        Sign::Minus => (m + 2) / 2,
    };
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// One reconstruction attempt from a set of levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub levels: Vec<u32>,
    pub profile: Option<InvariantProfile>,
    /// The Newton polygon of the modulus lies strictly above that of the
    /// representative up to lambda, so the profile is that of theta itself.
    pub trusted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedLSeries {
    pub p: u64,
    pub sign: Sign,
    pub label: String,
    pub discriminant: i64,
    pub n_max: u32,
    pub precision: i64,
    /// Levels whose cyclotomic polynomials make up the modulus.
    pub levels: Vec<u32>,
    /// `theta^sign` modulo the product of `Phi_{p^m}(1 + X)` over `levels`.
    pub representative: IwasawaElement1,
    pub profile: InvariantProfile,
    pub trusted: bool,
    pub history: Vec<LevelRecord>,
}

impl SignedLSeries {
    /// The exact modulus `prod_{m in levels} Phi_{p^m}(1 + X)`.
    pub fn modulus(&self) -> Result<Vec<BigInt>> {
        let mut acc = vec![BigInt::from(1)];
        for &m in &self.levels {
            acc = crate::poly::zmul(&acc, &cyclotomic_poly(self.p, m)?);
        }
        Ok(acc)
    }

    pub fn modulus_degree(&self) -> usize {
        self.levels.iter().map(|&m| phi_prime_power(self.p, m) as usize).sum()
    }
}

/// Arithmetic modulo `q < 2^63` on coefficient vectors.
struct ModRing {
    q: u128,
}

impl ModRing {
    fn from_big(&self, x: &BigInt) -> u128 {
        let q = BigInt::from(self.q);
        x.mod_floor(&q).to_u128().unwrap()
    }

    fn mul(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let mut out = vec![0u128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(b) {
                *o = (*o + x * y) % self.q;
            }
        }
        out
    }

    /// Exact quotient by a monic divisor.
    fn div_monic(&self, a: &[u128], m: &[u128]) -> Vec<u128> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        let mut quo = vec![0u128; a.len() - dm];
        for top in (dm..a.len()).rev() {
            let c = r[top];
            quo[top - dm] = c;
            if c == 0 {
                continue;
            }
            for (i, &mi) in m.iter().enumerate() {
                let idx = top - dm + i;
                r[idx] = (r[idx] + self.q - c * mi % self.q) % self.q;
            }
        }
        debug_assert!(r.iter().all(|&x| x == 0));
        quo
    }

    /// `sum c_i zeta^i -> sum c_i (1 + X)^i`.
    fn shift_by_one(&self, c: &[u128]) -> Vec<u128> {
        let n = c.len();
        let mut out = vec![0u128; n];
        for &coeff in c.iter().rev() {
            for j in (1..n).rev() {
                out[j] = (out[j] + out[j - 1]) % self.q;
            }
            out[0] = (out[0] + coeff) % self.q;
        }
        out
    }
}

/// `sum_{i < p} i zeta^{i p^{m-1}}`, which is `p / (zeta^{p^{m-1}} - 1)`.
fn p_over_eta_minus_one(p: u64, m: u32) -> CyclotomicInt {
    let q = ipow(p, m);
    let step = ipow(p, m - 1) as usize;
    let mut w = vec![BigInt::zero(); q as usize];
    for i in 0..p as usize {
        w[i * step] = BigInt::from(i);
    }
    CyclotomicInt::from_exponent_sums(q, w)
}

fn zeta_minus_one(p: u64, m: u32) -> CyclotomicInt {
    let q = ipow(p, m);
    CyclotomicInt::zeta_power(q, 1).sub(&CyclotomicInt::one(q))
}

/// `theta(zeta - 1)` scaled by `p` at a level: the interpolated value times `p`,
/// computed with the cyclotomic factors of both parities below `m` multiplied
/// in explicitly.
fn interpolated_value_times_p(mt: &MazurTateElement, sign: Sign) -> Result<CyclotomicInt> {
    let (p, m) = (mt.p, mt.level);
    let q = ipow(p, m);
    // 1/prod_{k<m, k of the other parity} Phi = prod_{k<m, same parity} Phi * (zeta-1)/(eta-1)
    let mut acc = mt.character_value(1);
    for k in 1..m {
        if k % 2 == m % 2 {
            let step = ipow(p, k - 1) as usize;
            let mut w = vec![BigInt::zero(); q as usize];
            for i in 0..p as usize {
                w[i * step] = BigInt::from(1);
            }
            acc = CyclotomicInt::from_exponent_sums(q, w).mul(&acc);
        }
    }
    acc = zeta_minus_one(p, m).mul(&acc);
    acc = p_over_eta_minus_one(p, m).mul(&acc);
    Ok(acc.scale(&Ratio::from_integer(BigInt::from(interpolation_sign(sign, m)))))
}

/// Lifts the interpolation data on `levels` to the unique representative
/// of degree below the modulus, with coefficients modulo `p^precision`.
fn crt_lift(mts: &[&MazurTateElement], sign: Sign, precision: i64) -> Result<Vec<BigInt>> {
    let p = mts[0].p;
    let e = mts.len() as u32;
    let digits = u32::try_from(precision).map_err(|_| invalid!("bad precision"))? + e;
    let q = (p as u128).checked_pow(digits).filter(|&q| q < (1u128 << 63)).ok_or_else(|| {
        Error::Resource(format!("p^{digits} does not fit the 63-bit working modulus"))
    })?;
    let ring = ModRing { q };
    let phis: Vec<Vec<u128>> = mts
        .iter()
        .map(|mt| Ok(cyclotomic_poly(p, mt.level)?.iter().map(|c| ring.from_big(c)).collect()))
        .collect::<Result<_>>()?;
    let mut big_m = vec![1u128];
    for phi in &phis {
        big_m = ring.mul(&big_m, phi);
    }
    let mut r = vec![0u128; big_m.len() - 1];
    for (idx, mt) in mts.iter().enumerate() {
        let m = mt.level;
        if !interpolation_parity(sign).matches(m) {
            return Err(invalid!("level {m} does not interpolate theta^{}", sign.symbol()));
        }
        let higher = mts.iter().filter(|o| o.level > m).count() as u32;
        // w_m = sign * B_m * (zeta - 1) / ((eta - 1) p^higher)
        let z = p_over_eta_minus_one(p, m).mul(&zeta_minus_one(p, m).mul(&mt.character_value(1)));
        debug_assert!(z.denominator() == &BigInt::from(1));
        let zx = ring.shift_by_one(&z.coeffs().iter().map(|c| ring.from_big(c)).collect::<Vec<_>>());
        let cofactor = ring.div_monic(&big_m, &phis[idx]);
        let scale = (p as u128).pow(e - higher - 1) % q;
        let scale = if interpolation_sign(sign, m) < 0 { (q - scale) % q } else { scale };
        let term = ring.mul(&zx, &cofactor);
        for (o, t) in r.iter_mut().zip(&term) {
            *o = (*o + t * scale) % q;
        }
    }
    let pe = (p as u128).pow(e);
    if r.iter().any(|c| c % pe != 0) {
        return Err(Error::Internal("interpolation lift is not p-integral".into()));
    }
    Ok(r.into_iter().map(|c| BigInt::from(c / pe)).collect())
}

/// Newton polygon of the modulus: `|levels|` at 0, then a drop of 1 across
/// each `Phi_{p^m}` in increasing `m`.
fn modulus_polygon(p: u64, levels: &[u32], x: usize) -> Ratio<i64> {
    let mut height = Ratio::from_integer(levels.len() as i64);
    let mut left = x as i64;
    let mut sorted = levels.to_vec();
    sorted.sort();
    for m in sorted {
        let len = phi_prime_power(p, m) as i64;
        if left <= len {
            return height - Ratio::new(left, len);
        }
        height -= 1;
        left -= len;
    }
    Ratio::zero()
}

fn profile_polygon(profile: &InvariantProfile, x: usize) -> Ratio<i64> {
    let mut height: Ratio<i64> = profile
        .slopes
        .iter()
        .map(|s| s.valuation * Ratio::from_integer(s.count as i64))
        .sum::<Ratio<i64>>()
        + Ratio::from_integer(profile.mu);
    let mut left = x as i64;
    for s in &profile.slopes {
        let len = s.count as i64;
        let step = left.min(len);
        height -= s.valuation * Ratio::from_integer(step);
        left -= step;
    }
    height
}

fn is_trusted(p: u64, levels: &[u32], profile: &InvariantProfile) -> bool {
    profile.stabilized
        && (0..=profile.lambda).all(|i| modulus_polygon(p, levels, i) > profile_polygon(profile, i))
}

/// Reconstructs `theta^sign` from Mazur-Tate elements of levels `1..=n_max`
/// (extra levels are ignored), recording the profile for each prefix of
/// the interpolation levels.
pub fn reconstruct_signed(
    mts: &[MazurTateElement],
    sign: Sign,
    n_max: u32,
    precision: i64,
    trunc_degree: usize,
) -> Result<SignedLSeries> {
    let first = mts.first().ok_or_else(|| invalid!("no Mazur-Tate elements supplied"))?;
    let p = first.p;
    if precision < 1 {
        return Err(invalid!("precision must be positive"));
    }
    let parity = interpolation_parity(sign);
    let mut chosen: Vec<&MazurTateElement> = Vec::new();
    for m in (1..=n_max).filter(|&m| parity.matches(m)) {
        let mt = mts
            .iter()
            .find(|mt| mt.level == m)
            .ok_or_else(|| invalid!("missing Mazur-Tate element of level {m}"))?;
        if mt.p != p || mt.provenance != first.provenance {
            return Err(invalid!("Mazur-Tate elements come from different data"));
        }
        chosen.push(mt);
    }
    if chosen.is_empty() {
        return Err(invalid!("n_max = {n_max} leaves no level for theta^{}", sign.symbol()));
    }
    let degree: usize = chosen.iter().map(|mt| phi_prime_power(p, mt.level) as usize).sum();
    if degree > trunc_degree + 1 {
        return Err(Error::TruncationInsufficient(format!(
            "modulus degree {degree} exceeds truncation degree {trunc_degree}"
        )));
    }
    let mut history = Vec::new();
    let mut last = None;
    for k in 1..=chosen.len() {
        let prefix = &chosen[..k];
        let levels: Vec<u32> = prefix.iter().map(|mt| mt.level).collect();
        let coeffs = crt_lift(prefix, sign, precision)?;
        let rep = IwasawaElement1::from_bigints(p, &coeffs, precision, trunc_degree)?;
        let profile = match newton_invariants(&rep) {
            Ok(pr) => Some(pr),
            Err(Error::PrecisionInsufficient(_)) => None,
            Err(e) => return Err(e),
        };
        let trusted = profile.as_ref().is_some_and(|pr| is_trusted(p, &levels, pr));
        history.push(LevelRecord { levels: levels.clone(), profile: profile.clone(), trusted });
        last = Some((levels, rep, profile, trusted));
    }
    let (levels, representative, profile, trusted) = last.unwrap();
    let mut profile = profile.ok_or_else(|| {
        Error::PrecisionInsufficient("representative vanishes to the working precision".into())
    })?;
    let tail = &history[history.len().saturating_sub(2)..];
    profile.stabilized = tail.len() == 2
        && tail.iter().all(|r| r.trusted)
        && tail[0].profile.as_ref().zip(tail[1].profile.as_ref()).is_some_and(|(a, b)| a.same_invariants(b));
    Ok(SignedLSeries {
        p,
        sign,
        label: first.provenance.label.clone(),
        discriminant: first.provenance.discriminant,
        n_max,
        precision,
        levels,
        representative,
        profile,
        trusted,
        history,
    })
}

/// Levels where evaluating the representative at `zeta_{p^m} - 1` does not
/// reproduce the interpolation value modulo `p^precision`.
pub fn reinterpolation_failures(series: &SignedLSeries, mts: &[MazurTateElement]) -> Result<Vec<u32>> {
    let p = series.p;
    let digits = u32::try_from(series.precision).map_err(|_| invalid!("bad precision"))? + 1;
    let q = (p as u128)
        .checked_pow(digits)
        .filter(|&q| q < (1u128 << 63))
        .ok_or_else(|| Error::Resource("working modulus overflow".into()))?;
    let ring = ModRing { q };
    let pn = q / p as u128;
    let rep: Vec<u128> = series
        .representative
        .coeffs()
        .iter()
        .map(|c| ring.from_big(&c.to_rational().to_integer()) % pn)
        .collect();
    let mut failures = Vec::new();
    for &m in &series.levels {
        let mt = mts
            .iter()
            .find(|mt| mt.level == m)
            .ok_or_else(|| invalid!("missing Mazur-Tate element of level {m}"))?;
        let target = interpolated_value_times_p(mt, series.sign)?;
        if target.denominator() != &BigInt::from(1) {
            failures.push(m);
            continue;
        }
        let tx = ring.shift_by_one(&target.coeffs().iter().map(|c| ring.from_big(c)).collect::<Vec<_>>());
        if tx.iter().any(|c| c % p as u128 != 0) {
            failures.push(m);
            continue;
        }
        let phi: Vec<u128> = cyclotomic_poly(p, m)?.iter().map(|c| ring.from_big(c)).collect();
        let reduced = rem_monic_mod(&rep, &phi, pn);
        let ok = reduced.iter().zip(&tx).all(|(a, b)| *a % pn == (b / p as u128) % pn);
        if !ok {
            failures.push(m);
        }
    }
    Ok(failures)
}

fn rem_monic_mod(a: &[u128], m: &[u128], q: u128) -> Vec<u128> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    if r.len() < dm {
        r.resize(dm, 0);
    }
    for top in (dm..r.len()).rev() {
        let c = r[top] % q;
        r[top] = 0;
        if c == 0 {
            continue;
        }
        for (i, &mi) in m[..dm].iter().enumerate() {
            let idx = top - dm + i;
            r[idx] = (r[idx] + q - c * (mi % q) % q) % q;
        }
    }
    r.truncate(dm);
    r
}

/// Outcome of comparing the two signed series at the trivial character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatioStatus {
    Match,
    /// Agreement only after changing the sign of one series.
    MatchUpToSign,
    Mismatch,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioReport {
    pub p: u64,
    /// `(p - 1) / 2`.
    pub expected: (i64, i64),
    /// Digits to which both constant terms are determined.
    pub digits: i64,
    pub status: RatioStatus,
    pub note: String,
}

/// Compares `theta^+(0) / theta^-(0)` with `(p - 1)/2`. Each constant term is
/// known only modulo `p^{number of levels}`, since the modulus takes the value
/// `p` per level at `X = 0`. Both series carry the same symbol scaling, so the
/// only residual ambiguity is the relative sign convention.
pub fn trivial_character_ratio_check(plus: &SignedLSeries, minus: &SignedLSeries) -> Result<RatioReport> {
    if plus.p != minus.p || plus.sign != Sign::Plus || minus.sign != Sign::Minus {
        return Err(invalid!("expected a (+, -) pair over the same prime"));
    }
    let p = plus.p;
    let digits = (plus.levels.len().min(minus.levels.len()) as i64).min(plus.precision.min(minus.precision));
    let modulus = BigInt::from(p).pow(digits as u32);
    let c0 = |s: &SignedLSeries| s.representative.coeff(0).to_rational().to_integer().mod_floor(&modulus);
    let (a, b) = (c0(plus), c0(minus));
    let expected = (((p - 1) / 2) as i64, 1i64);
    let note = String::from("constant terms are compared modulo p^digits under a shared symbol scaling");
    if a.is_zero() || b.is_zero() {
        return Ok(RatioReport { p, expected, digits, status: RatioStatus::Inconclusive, note });
    }
    // 2 theta^+(0) = (p - 1) theta^-(0)
    let lhs = (BigInt::from(2) * &a).mod_floor(&modulus);
    let rhs = (BigInt::from(p - 1) * &b).mod_floor(&modulus);
    let status = if lhs == rhs {
        RatioStatus::Match
    } else if (&lhs + &rhs).mod_floor(&modulus).is_zero() {
        RatioStatus::MatchUpToSign
    } else {
        RatioStatus::Mismatch
    };
    Ok(RatioReport { p, expected, digits, status, note })
}
