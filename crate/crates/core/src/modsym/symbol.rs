//! Normalized eigensymbols of rational elliptic curves and their quadratic twists.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::curve::{chi_d, CurveData};
use super::linalg::{content_of, dot, rat_mod, rational_reconstruct, ModEchelon, MODULUS};
use super::p1::P1List;
use super::space::{for_each_manin_symbol, ManinSymbolSpace};
use crate::arith::{gcd_i64, is_fundamental_discriminant, primes_up_to};
use crate::error::{invalid, Error, Result};
use crate::iwasawa::Sign;

/// Primes tried when cutting out the eigenspace.
const ISOLATION_PRIME_BOUND: u64 = 400;

/// The plus or minus eigensymbol of a curve, scaled so that its values on
/// Manin symbols are coprime integers with the first nonzero one positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSymbol {
    pub label: String,
    pub level: u64,
    pub sign: Sign,
    /// Values on the Manin symbols, in `P1List` order.
    pub values: Vec<i64>,
    /// The factor divided out of the raw eigenvector.
    #[serde(with = "crate::ser::rational")]
    pub content: BigRational,
    /// Hecke eigenvalues used to isolate the eigenline.
    pub certificate: Vec<(u64, i64)>,
}

fn sign_value(sign: Sign) -> i64 {
    match sign {
        Sign::Plus => 1,
        Sign::Minus => -1,
    }
}

/// Cuts out the `sign` part of the Hecke eigenline of `curve` in the Manin
/// quotient, solving modulo a large prime, lifting by rational
/// reconstruction and checking the lift exactly.
pub fn extract_eigensymbol(curve: &CurveData, sign: Sign) -> Result<EigenSymbol> {
    let space = ManinSymbolSpace::build(curve.conductor)?;
    extract_from_space(&space, curve, sign)
}

pub fn extract_from_space(space: &ManinSymbolSpace, curve: &CurveData, sign: Sign) -> Result<EigenSymbol> {
    if space.level() != curve.conductor {
        return Err(invalid!("space level {} differs from conductor {}", space.level(), curve.conductor));
    }
    let dim = space.dimension();
    let s = sign_value(sign);
    let basis = space.basis_generators();
    let p1 = space.p1();
    let mut ech = ModEchelon::new(dim);
    let to_row = |col: &[(usize, BigRational)], j: usize, eigen: i64| -> Vec<u64> {
        let mut row = vec![0u64; dim];
        for (k, c) in col {
            row[*k] = rat_mod(c);
        }
        row[j] = (row[j] + MODULUS - (eigen.rem_euclid(MODULUS as i64) as u64)) % MODULUS;
        row
    };
    // phi(star g_j) = s phi(g_j) and phi(T_ell g_j) = a_ell phi(g_j)
    let star_cols: Vec<_> = basis.iter().map(|&g| space.coordinates(p1.star(g)).clone()).collect();
    for (j, col) in star_cols.iter().enumerate() {
        ech.insert(to_row(col, j, s));
    }
    let mut certificate = Vec::new();
    let mut hecke_cols = Vec::new();
    for ell in primes_up_to(ISOLATION_PRIME_BOUND) {
        if ech.rank() + 1 >= dim {
            break;
        }
        if curve.conductor % ell == 0 {
            continue;
        }
        let a = curve.count_points(ell)?;
        let cols = space.hecke_matrix(ell);
        for (j, col) in cols.iter().enumerate() {
            ech.insert(to_row(col, j, a));
        }
        certificate.push((ell, a));
        hecke_cols.push((a, cols));
    }
    if ech.rank() + 1 != dim {
        return Err(Error::IsolationFailure { dimension: dim - ech.rank() });
    }
    let kernel = ech.kernel();
    let v = &kernel[0];
    let phi: Vec<BigRational> = v
        .iter()
        .map(|&x| rational_reconstruct(x).ok_or_else(|| Error::Internal("rational reconstruction failed".into())))
        .collect::<Result<_>>()?;
    // exact verification of every imposed equation
    let holds = |cols: &[Vec<(usize, BigRational)>], eigen: i64| {
        cols.iter()
            .enumerate()
            .all(|(j, col)| dot(col, &phi) == BigRational::from_integer(eigen.into()) * &phi[j])
    };
    if !holds(&star_cols, s) || !hecke_cols.iter().all(|(a, cols)| holds(cols, *a)) {
        return Err(Error::Internal("eigenvector lift does not satisfy the Hecke equations".into()));
    }
    let raw: Vec<BigRational> = (0..space.num_generators()).map(|i| dot(space.coordinates(i), &phi)).collect();
    let mut content = content_of(&raw);
    if raw.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        content = -content;
    }
    let values = raw
        .iter()
        .map(|x| {
            let q = x / &content;
            debug_assert!(q.is_integer());
            q.to_integer().to_i64().ok_or_else(|| Error::Resource("symbol value exceeds i64".into()))
        })
        .collect::<Result<_>>()?;
    Ok(EigenSymbol {
        label: curve.label.clone(),
        level: curve.conductor,
        sign,
        values,
        content,
        certificate,
    })
}

impl EigenSymbol {
    /// Exact check that the stored values form a normalized eigensymbol of
    /// `curve` for the recorded sign and Hecke eigenvalues. Used to validate
    /// symbols read back from disk.
    pub fn verify(&self, curve: &CurveData) -> Result<()> {
        let bad = |why: &str| Err(invalid!("stored eigensymbol is invalid: {why}"));
        if self.level != curve.conductor || self.label != curve.label {
            return bad("curve mismatch");
        }
        if self.values.len() != P1List::expected_len(self.level) {
            return bad("wrong number of values");
        }
        let g = self.values.iter().fold(0i64, |g, &v| g.gcd(&v));
        if g != 1 || self.values.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
            return bad("values are not normalized");
        }
        let space = ManinSymbolSpace::build(self.level)?;
        let basis_values: Vec<BigRational> = space
            .basis_generators()
            .iter()
            .map(|&i| BigRational::from_integer(self.values[i].into()))
            .collect();
        let consistent = (0..space.num_generators())
            .all(|i| dot(space.coordinates(i), &basis_values) == BigRational::from_integer(self.values[i].into()));
        if !consistent {
            return bad("values violate the Manin relations");
        }
        let eigen = |cols: &[Vec<(usize, BigRational)>], a: i64| {
            cols.iter()
                .enumerate()
                .all(|(j, col)| dot(col, &basis_values) == BigRational::from_integer(a.into()) * &basis_values[j])
        };
        if !eigen(&space.star_matrix(), sign_value(self.sign)) {
            return bad("wrong star eigenvalue");
        }
        for &(ell, a) in &self.certificate {
            if curve.conductor % ell == 0 || curve.count_points(ell)? != a || !eigen(&space.hecke_matrix(ell), a) {
                return bad("Hecke certificate fails");
            }
        }
        Ok(())
    }

    pub fn evaluator(&self) -> SymbolEvaluator {
        SymbolEvaluator { p1: P1List::new(self.level), values: self.values.clone() }
    }

    /// `[a/m]`, the value on the path from `a/m` to infinity.
    pub fn eval_path(&self, a: i64, m: i64) -> Result<BigRational> {
        Ok(BigRational::from_integer(self.evaluator().eval(a, m)?.into()))
    }
}

/// Precomputed lookup for fast path evaluation.
#[derive(Clone, Debug)]
pub struct SymbolEvaluator {
    p1: P1List,
    values: Vec<i64>,
}

impl SymbolEvaluator {
    pub fn level(&self) -> u64 {
        self.p1.level()
    }

    /// Integer value of `[a/m]` for `m > 0`.
    pub fn eval(&self, a: i64, m: i64) -> Result<i64> {
        if m <= 0 {
            return Err(invalid!("denominator must be positive, got {m}"));
        }
        Ok(self.eval_unchecked(a as i128, m as i128))
    }

    #[inline]
    pub fn eval_unchecked(&self, a: i128, m: i128) -> i64 {
        let n = self.p1.level() as i128;
        let mut acc = 0i64;
        // {inf, a/m} = -{a/m, inf}
        for_each_manin_symbol(a, m, |c, d| {
            let i = self
                .p1
                .index_reduced(c.rem_euclid(n) as u64, d.rem_euclid(n) as u64)
                .expect("continued-fraction symbols are points of P^1");
            acc -= self.values[i];
        });
        acc
    }
}

/// The modular symbol of the twist by a fundamental discriminant `d`, built
/// from the eigensymbol of the base curve and rescaled to be primitive on a
/// fixed family of probe paths.
#[derive(Clone, Debug)]
pub struct TwistedSymbol {
    pub discriminant: i64,
    pub sign: Sign,
    base: SymbolEvaluator,
    content: BigInt,
}

/// Denominators used to fix the scaling of a twisted symbol.
const PROBE_DENOMINATORS: u64 = 24;

impl TwistedSymbol {
    /// `sign` is the sign of the twisted symbol. For `d < 0` it comes from the
    /// base symbol of the opposite sign.
    pub fn new(base: &EigenSymbol, discriminant: i64) -> Result<Self> {
        if discriminant != 1 && !is_fundamental_discriminant(discriminant) {
            return Err(invalid!("{discriminant} is not a fundamental discriminant"));
        }
        let sign = if discriminant < 0 { base.sign.flip() } else { base.sign };
        let mut t = Self { discriminant, sign, base: base.evaluator(), content: BigInt::one() };
        let q = discriminant.unsigned_abs() as i64;
        let mut g = BigInt::zero();
        for m in 1..=PROBE_DENOMINATORS as i64 {
            if gcd_i64(m, q) != 1 {
                continue;
            }
            for a in 0..m {
                if gcd_i64(a, m) == 1 {
                    g = g.gcd(&BigInt::from(t.raw(a, m)));
                }
            }
        }
        if !g.is_zero() {
            t.content = g;
        }
        Ok(t)
    }

    pub fn content(&self) -> &BigInt {
        &self.content
    }

    fn raw(&self, a: i64, m: i64) -> i64 {
        let q = self.discriminant.unsigned_abs() as i64;
        if q == 1 {
            return self.base.eval_unchecked(a as i128, m as i128);
        }
        let (a, m, qq) = (a as i128, m as i128, q as i128);
        (0..q)
            .map(|u| {
                let chi = chi_d(self.discriminant, u);
                if chi == 0 {
                    0
                } else {
                    chi * self.base.eval_unchecked(a * qq + u as i128 * m, m * qq)
                }
            })
            .sum()
    }

    /// Integer value of the twisted `[a/m]`; requires `gcd(m, d) = 1`.
    pub fn value_int(&self, a: i64, m: i64) -> Result<i64> {
        if m <= 0 {
            return Err(invalid!("denominator must be positive, got {m}"));
        }
        if gcd_i64(m, self.discriminant) != 1 {
            return Err(invalid!("denominator {m} is not coprime to {}", self.discriminant));
        }
        let raw = BigInt::from(self.raw(a, m));
        let (q, r) = raw.div_rem(&self.content);
        if !r.is_zero() {
            return Err(Error::Internal(format!("twisted value at {a}/{m} is not integral")));
        }
        q.to_i64().ok_or_else(|| Error::Resource("twisted value exceeds i64".into()))
    }

    pub fn value(&self, a: i64, m: i64) -> Result<BigRational> {
        Ok(BigRational::from_integer(self.value_int(a, m)?.into()))
    }
}

/// Convenience: the twisted symbol of sign `twist_sign` for `curve` and `d`.
pub fn twist_symbol(curve: &CurveData, discriminant: i64, twist_sign: Sign) -> Result<TwistedSymbol> {
    let base_sign = if discriminant < 0 { twist_sign.flip() } else { twist_sign };
    let base = extract_eigensymbol(curve, base_sign)?;
    TwistedSymbol::new(&base, discriminant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::curve::builtin_curve;

    #[test]
    fn stored_symbols_verify() {
        let e = builtin_curve("32a").unwrap();
        let s = extract_eigensymbol(&e, Sign::Plus).unwrap();
        assert!(s.verify(&e).is_ok());
        let mut bad = s.clone();
        bad.values[1] += 1;
        assert!(bad.verify(&e).is_err());
        let mut flipped = s.clone();
        flipped.sign = Sign::Minus;
        assert!(flipped.verify(&e).is_err());
    }

    #[test]
    fn eleven_a_plus_symbol() {
        let e = builtin_curve("11a").unwrap();
        let plus = extract_eigensymbol(&e, Sign::Plus).unwrap();
        let minus = extract_eigensymbol(&e, Sign::Minus).unwrap();
        // [0] is proportional to L(E,1)/Omega = 1/5 and [a/m] + [-a/m] pattern
        let ev = plus.evaluator();
        for m in 1..30i64 {
            for a in 0..m {
                assert_eq!(ev.eval(a, m).unwrap(), ev.eval(-a, m).unwrap());
                assert_eq!(ev.eval(a, m).unwrap(), ev.eval(a + m, m).unwrap());
            }
        }
        let mv = minus.evaluator();
        for m in 1..30i64 {
            for a in 0..m {
                assert_eq!(mv.eval(a, m).unwrap(), -mv.eval(-a, m).unwrap());
            }
        }
        assert!(ev.eval(0, 1).unwrap() != 0);
        assert!(plus.values.iter().any(|&v| v != 0));
    }

    #[test]
    fn hecke_relation_on_paths() {
        // sum_{w<ell} [(a + w m)/(ell m)] + [ell a / m] = a_ell [a/m]
        let e = builtin_curve("11a").unwrap();
        let plus = extract_eigensymbol(&e, Sign::Plus).unwrap();
        let ev = plus.evaluator();
        for ell in [2i64, 3, 5, 7] {
            let a_ell = e.count_points(ell as u64).unwrap();
            for m in 1..12i64 {
                for a in 0..m {
                    let mut lhs = ev.eval(ell * a, m).unwrap();
                    for w in 0..ell {
                        lhs += ev.eval(a + w * m, ell * m).unwrap();
                    }
                    assert_eq!(lhs, a_ell * ev.eval(a, m).unwrap(), "ell={ell} a/m={a}/{m}");
                }
            }
        }
    }

    #[test]
    fn twist_by_one_is_identity() {
        let e = builtin_curve("32a").unwrap();
        let plus = extract_eigensymbol(&e, Sign::Plus).unwrap();
        let t = TwistedSymbol::new(&plus, 1).unwrap();
        let ev = plus.evaluator();
        assert_eq!(t.sign, Sign::Plus);
        for m in 1..20 {
            for a in 0..m {
                assert_eq!(t.value_int(a, m).unwrap(), ev.eval(a, m).unwrap());
            }
        }
    }

    #[test]
    fn twist_rejects_common_factors() {
        let e = builtin_curve("32a").unwrap();
        let t = twist_symbol(&e, -3, Sign::Plus).unwrap();
        assert!(matches!(t.value_int(1, 9), Err(Error::InvalidArgument(_))));
        assert!(TwistedSymbol::new(&extract_eigensymbol(&e, Sign::Plus).unwrap(), 9).is_err());
    }

    #[test]
    fn twist_matches_symbol_of_twisted_curve() {
        // 32a twisted by -3 has conductor 288
        let e = builtin_curve("32a").unwrap();
        let twisted_curve = e.quadratic_twist(-3, "288-twist", 288).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let direct = extract_eigensymbol(&twisted_curve, sign).unwrap().evaluator();
            let via = twist_symbol(&e, -3, sign).unwrap();
            let mut ratio: Option<(i64, i64)> = None;
            for m in 1..40i64 {
                if m % 3 == 0 {
                    continue;
                }
                for a in 0..m {
                    let x = direct.eval(a, m).unwrap();
                    let y = via.value_int(a, m).unwrap();
                    match ratio {
                        None if x != 0 || y != 0 => ratio = Some((x, y)),
                        Some((x0, y0)) => assert_eq!(x * y0, y * x0, "{a}/{m}"),
                        None => {}
                    }
                }
            }
            let (x0, y0) = ratio.unwrap();
            assert!(x0 != 0 && y0 != 0);
        }
    }

    #[test]
    fn double_twist_identity() {
        // twisting twice by chi_{-3} gives 3 phi(x) - a_3 phi(3x) + phi(9x), up to chi(-1)
        let e = builtin_curve("11a").unwrap();
        let base = extract_eigensymbol(&e, Sign::Plus).unwrap();
        let ev = base.evaluator();
        let a3 = e.count_points(3).unwrap();
        let q = 3i64;
        for m in 1..15i64 {
            if m % 3 == 0 {
                continue;
            }
            for a in 0..m {
                let mut twice = 0i64;
                for u in 0..q {
                    for v in 0..q {
                        let chi = chi_d(-3, u) * chi_d(-3, v);
                        if chi != 0 {
                            // a/m + u/q + v/q
                            twice += chi * ev.eval(a * q + (u + v) * m, m * q).unwrap();
                        }
                    }
                }
                let expected = chi_d(-3, -1)
                    * (q * ev.eval(a, m).unwrap() - a3 * ev.eval(a * q, m).unwrap() + ev.eval(a * q * q, m).unwrap());
                assert_eq!(twice, expected, "{a}/{m}");
            }
        }
    }
}
