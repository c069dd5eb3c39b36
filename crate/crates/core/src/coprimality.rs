//! Coprimality certificates for one-variable Iwasawa elements and the
//! pseudo-nullity report built on them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::iwasawa::{
    bird_determinant, newton_invariants, weierstrass_prepare, InvariantProfile, IwasawaElement1, Sign,
};
use crate::padic::PadicScalar;
use crate::signed::SignedLSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    SlopeDisjoint,
    Resultant,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Coprime,
    /// A common factor is visible (shared p, or a shared polynomial factor).
    NotCertified,
    /// Precision or stabilization ran out before either conclusion.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoprimalityCertificate {
    pub method: Method,
    pub f_profile: Option<InvariantProfile>,
    pub g_profile: Option<InvariantProfile>,
    pub resultant_valuation: Option<Ratio<i64>>,
    pub verdict: Verdict,
    pub note: String,
}

impl CoprimalityCertificate {
    fn new(f: Option<InvariantProfile>, g: Option<InvariantProfile>, verdict: Verdict, note: &str) -> Self {
        Self {
            method: Method::Inconclusive,
            f_profile: f,
            g_profile: g,
            resultant_valuation: None,
            verdict,
            note: note.into(),
        }
    }
}

/// True iff the (stabilized) series is a unit of the Iwasawa algebra.
pub fn is_unit(f: &SignedLSeries) -> Result<bool> {
    if !f.trusted || !f.profile.stabilized {
        return Err(Error::Inconclusive(format!(
            "theta^{} of {} is not stabilized at n_max = {}",
            f.sign.symbol(),
            f.label,
            f.n_max
        )));
    }
    Ok(f.profile.is_unit())
}

pub fn slopes_disjoint(f: &InvariantProfile, g: &InvariantProfile) -> bool {
    let gs = g.slope_values();
    f.slope_values().iter().all(|s| !gs.contains(s))
}

/// Slope test on profiles alone: the shared-p and slope-disjoint outcomes,
/// or `None` when the slopes overlap.
fn profile_certificate(f: &InvariantProfile, g: &InvariantProfile) -> Option<CoprimalityCertificate> {
    let (fp, gp) = (Some(f.clone()), Some(g.clone()));
    if !f.stabilized || !g.stabilized {
        return Some(CoprimalityCertificate::new(fp, gp, Verdict::Inconclusive, "profile not stabilized"));
    }
    if f.mu > 0 && g.mu > 0 {
        return Some(CoprimalityCertificate::new(fp, gp, Verdict::NotCertified, "both are divisible by p"));
    }
    if slopes_disjoint(f, g) {
        let note = if f.mu > 0 || g.mu > 0 { "slopes disjoint; p divides exactly one side" } else { "slopes disjoint" };
        let mut c = CoprimalityCertificate::new(fp, gp, Verdict::Coprime, note);
        c.method = Method::SlopeDisjoint;
        return Some(c);
    }
    None
}

/// Certificate for two explicit elements: slope disjointness first, then
/// the resultant of the distinguished polynomials.
pub fn coprime_certificate(f: &IwasawaElement1, g: &IwasawaElement1) -> Result<CoprimalityCertificate> {
    if f.prime() != g.prime() {
        return Err(invalid!("elements over different primes"));
    }
    let (fp, gp) = match (newton_invariants(f), newton_invariants(g)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            return Ok(CoprimalityCertificate::new(
                a.ok(),
                b.ok(),
                Verdict::Inconclusive,
                "an input is zero within precision",
            ))
        }
    };
    if let Some(c) = profile_certificate(&fp, &gp) {
        return Ok(c);
    }
    let (Ok(wf), Ok(wg)) = (weierstrass_prepare(f), weierstrass_prepare(g)) else {
        return Ok(CoprimalityCertificate::new(Some(fp), Some(gp), Verdict::Inconclusive, "preparation failed"));
    };
    let pf: Vec<_> = wf.distinguished.coeffs()[..=fp.lambda].to_vec();
    let pg: Vec<_> = wg.distinguished.coeffs()[..=gp.lambda].to_vec();
    let res = resultant(f.prime(), &pf, &pg);
    if let Some(v) = res.coeff(0).valuation() {
        let mut c = CoprimalityCertificate::new(Some(fp), Some(gp), Verdict::Coprime, "resultant is nonzero");
        c.method = Method::Resultant;
        c.resultant_valuation = Some(Ratio::from_integer(v));
        return Ok(c);
    }
    let approx = |v: &[PadicScalar]| v.iter().map(|c| c.to_rational()).collect::<Vec<_>>();
    if rational_gcd_degree(&approx(&pf), &approx(&pg)) > 0 {
        let mut c = CoprimalityCertificate::new(
            Some(fp),
            Some(gp),
            Verdict::NotCertified,
            "resultant vanishes within precision and the distinguished parts share a factor",
        );
        c.method = Method::Resultant;
        return Ok(c);
    }
    Ok(CoprimalityCertificate::new(Some(fp), Some(gp), Verdict::Inconclusive, "resultant vanishes within precision"))
}

/// Certificate for reconstructed series. Only the slope route applies: the
/// representatives agree with the series only modulo the interpolation
/// modulus, so their distinguished parts are not the true ones.
pub fn coprime_certificate_series(f: &SignedLSeries, g: &SignedLSeries) -> CoprimalityCertificate {
    profile_certificate(&f.profile, &g.profile).unwrap_or_else(|| {
        CoprimalityCertificate::new(
            Some(f.profile.clone()),
            Some(g.profile.clone()),
            Verdict::Inconclusive,
            "slopes overlap; reconstructed series admit only the slope test",
        )
    })
}

/// Sylvester resultant of two polynomials with p-adic coefficients.
fn resultant(p: u64, f: &[PadicScalar], g: &[PadicScalar]) -> IwasawaElement1 {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let precision = f.iter().chain(g).map(|c| c.absolute_precision()).min().unwrap_or(1);
    let constant = |c: &PadicScalar| {
        IwasawaElement1::from_scalars(p, vec![c.clone()], precision, 0).expect("constant fits")
    };
    if m + n == 0 {
        return IwasawaElement1::from_ints(p, &[1], precision, 0).unwrap();
    }
    let zero = IwasawaElement1::zero(p, precision, 0);
    let size = m + n;
    let mut mat = vec![vec![zero; size]; size];
    for r in 0..n {
        for k in 0..=m {
            mat[r][r + k] = constant(&f[m - k]);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            mat[n + r][r + k] = constant(&g[n - k]);
        }
    }
    bird_determinant(&mat)
}

/// Degree of the gcd over Q of two rational polynomials.
fn rational_gcd_degree(a: &[BigRational], b: &[BigRational]) -> usize {
    let trim = |v: &mut Vec<BigRational>| {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
    };
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lead = b.last().unwrap().clone();
        while a.len() >= b.len() {
            let c = a.last().unwrap().clone() / &lead;
            let shift = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[shift + i] = &a[shift + i] - &c * bi;
            }
            a.pop();
            trim(&mut a);
        }
        core::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Profile of a product of a series and the series it multiplies, or a
/// zero flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductShadow {
    pub profile: Option<InvariantProfile>,
    pub zero_within_precision: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowReport {
    /// `theta_E^+ theta_{E_K}^+`.
    pub plus_plus: ProductShadow,
    /// `theta_E^- theta_{E_K}^-`.
    pub minus_minus: ProductShadow,
    /// The two summands of the mixed specialization, which is known only
    /// up to a unit between them.
    pub mixed_summands: (ProductShadow, ProductShadow),
    /// When `theta_E^+-` are units, coprimality of the specializations is
    /// equivalent to coprimality of `theta_{E_K}^+` and `theta_{E_K}^-`.
    pub reduction: Option<CoprimalityCertificate>,
    pub note: String,
}

fn product_shadow(a: &SignedLSeries, b: &SignedLSeries) -> ProductShadow {
    let zero = a.representative.is_zero_within_precision() || b.representative.is_zero_within_precision();
    if zero {
        return ProductShadow { profile: None, zero_within_precision: true };
    }
    let mut roots = a.profile.root_valuations();
    roots.extend(b.profile.root_valuations());
    let stabilized = a.profile.stabilized && b.profile.stabilized;
    ProductShadow {
        profile: Some(InvariantProfile::from_root_valuations(a.profile.mu + b.profile.mu, &roots, stabilized)),
        zero_within_precision: false,
    }
}

/// The cyclotomic shadows of the two-variable elements, from the four signed series.
pub fn shadow_products(
    theta_e: (&SignedLSeries, &SignedLSeries),
    theta_ek: (&SignedLSeries, &SignedLSeries),
) -> Result<ShadowReport> {
    for (s, expected) in [(theta_e.0, Sign::Plus), (theta_e.1, Sign::Minus), (theta_ek.0, Sign::Plus), (theta_ek.1, Sign::Minus)] {
        if s.sign != expected {
            return Err(invalid!("series pairs must be ordered (+, -)"));
        }
    }
    let plus_plus = product_shadow(theta_e.0, theta_ek.0);
    let minus_minus = product_shadow(theta_e.1, theta_ek.1);
    let mixed_summands = (product_shadow(theta_e.0, theta_ek.1), product_shadow(theta_e.1, theta_ek.0));
    let units = is_unit(theta_e.0).unwrap_or(false) && is_unit(theta_e.1).unwrap_or(false);
    let degenerate = plus_plus.zero_within_precision || mixed_summands.0.zero_within_precision;
    let (reduction, note) = if degenerate {
        (None, "a product is zero within precision; no certificate".into())
    } else if units {
        (
            Some(coprime_certificate_series(theta_ek.0, theta_ek.1)),
            "theta_E^+ and theta_E^- are units, so the mixed term reduces to theta_{E_K}^-+".into(),
        )
    } else {
        (None, String::from("theta_E^+- are not both units; the mixed unit is not guessed"))
    };
    Ok(ShadowReport { plus_plus, minus_minus, mixed_summands, reduction, note })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionStatus {
    Holds,
    Fails,
    Inconclusive,
}

/// Facts about the curves that are supplied rather than computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalFacts {
    /// E has complex multiplication, so the one-variable main conjecture is known.
    pub complex_multiplication: bool,
    /// The p-adic Galois representations of E and E_K are surjective.
    pub galois_surjective: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Main conjecture for CM curves (Pollack-Rubin).
    ComplexMultiplication,
    /// Kobayashi's divisibility for surjective representations.
    SurjectiveRepresentation,
    /// Only under the one- and two-variable main conjectures.
    AssumingMainConjectures,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PseudoNullity {
    Verified,
    Conditional,
    NotEstablished,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureBReport {
    pub label: String,
    pub discriminant: i64,
    pub p: u64,
    /// theta_E^+ is a unit.
    pub base_plus_unit: ConditionStatus,
    /// theta_{E_K}^+ and theta_{E_K}^- have no common factor.
    pub twist_pair_coprime: ConditionStatus,
    /// Neither theta_{E_K}^+ nor theta_{E_K}^- is a unit.
    pub twist_pair_nonunits: ConditionStatus,
    pub certificate: CoprimalityCertificate,
    pub route: Route,
    pub pseudo_nullity: PseudoNullity,
    pub notes: Vec<String>,
}

fn unit_status(s: &SignedLSeries, want_unit: bool) -> ConditionStatus {
    match is_unit(s) {
        Ok(u) if u == want_unit => ConditionStatus::Holds,
        Ok(_) => ConditionStatus::Fails,
        Err(_) => ConditionStatus::Inconclusive,
    }
}

pub fn conjecture_b_report(
    theta_e: (&SignedLSeries, &SignedLSeries),
    theta_ek: (&SignedLSeries, &SignedLSeries),
    facts: ExternalFacts,
) -> Result<ConjectureBReport> {
    let shadows = shadow_products(theta_e, theta_ek)?;
    let base_plus_unit = unit_status(theta_e.0, true);
    let certificate = coprime_certificate_series(theta_ek.0, theta_ek.1);
    let twist_pair_coprime = match certificate.verdict {
        Verdict::Coprime => ConditionStatus::Holds,
        Verdict::NotCertified => ConditionStatus::Fails,
        Verdict::Inconclusive => ConditionStatus::Inconclusive,
    };
    let nonunits = [unit_status(theta_ek.0, false), unit_status(theta_ek.1, false)];
    let twist_pair_nonunits = if nonunits.contains(&ConditionStatus::Inconclusive) {
        ConditionStatus::Inconclusive
    } else if nonunits.iter().all(|s| *s == ConditionStatus::Holds) {
        ConditionStatus::Holds
    } else {
        ConditionStatus::Fails
    };
    let route = if facts.complex_multiplication {
        Route::ComplexMultiplication
    } else if facts.galois_surjective {
        Route::SurjectiveRepresentation
    } else {
        Route::AssumingMainConjectures
    };
    let mut notes = vec![shadows.note.clone()];
    let conditions = [base_plus_unit, twist_pair_coprime];
    let pseudo_nullity = if conditions.contains(&ConditionStatus::Inconclusive) {
        PseudoNullity::Inconclusive
    } else if conditions.contains(&ConditionStatus::Fails) {
        PseudoNullity::NotEstablished
    } else if route == Route::AssumingMainConjectures {
        PseudoNullity::Conditional
    } else {
        PseudoNullity::Verified
    };
    notes.push(
        match route {
            Route::ComplexMultiplication => "route: main conjecture known for CM curves; supports of the ++ and +- Selmer duals meet in no height-one prime",
            Route::SurjectiveRepresentation => "route: surjective p-adic representations give the one-variable divisibility unconditionally",
            Route::AssumingMainConjectures => "route: conditional on the one- and two-variable main conjectures",
        }
        .into(),
    );
    if twist_pair_nonunits == ConditionStatus::Holds {
        notes.push("both twisted series are non-units, so the c2 of the two-variable quotient is nonzero under the main conjectures".into());
    }
    Ok(ConjectureBReport {
        label: theta_ek.0.label.clone(),
        discriminant: theta_ek.0.discriminant,
        p: theta_ek.0.p,
        base_plus_unit,
        twist_pair_coprime,
        twist_pair_nonunits,
        certificate,
        route,
        pseudo_nullity,
        notes,
    })
}

/// Convenience for tests and tools: profile of the product of two elements.
pub fn product_profile(f: &IwasawaElement1, g: &IwasawaElement1) -> Result<InvariantProfile> {
    newton_invariants(&f.mul(g))
}

/// The common-slope set of two profiles.
pub fn shared_slopes(f: &InvariantProfile, g: &InvariantProfile) -> Vec<Ratio<i64>> {
    let gs = g.slope_values();
    f.slope_values().into_iter().filter(|s| gs.contains(s)).collect()
}
