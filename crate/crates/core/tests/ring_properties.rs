//! Ring laws for p-adic scalars and truncated series, and Weierstrass preparation.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use signed_iwasawa_core::iwasawa::{newton_invariants, weierstrass_prepare, IwasawaElement1};
use signed_iwasawa_core::padic::PadicScalar;

const P: u64 = 3;

fn scalar() -> impl Strategy<Value = PadicScalar> {
    (-10_000i64..10_000, 1i64..50, 8i64..30).prop_map(|(n, d, prec)| {
        PadicScalar::from_rational(P, &BigRational::new(BigInt::from(n), BigInt::from(d)), prec)
    })
}

fn poly(max_degree: usize) -> impl Strategy<Value = IwasawaElement1> {
    (prop::collection::vec(-60i64..60, 1..=max_degree + 1), any::<prop::sample::Index>(), 1i64..3, 0u32..3).prop_map(
        |(mut c, idx, r, shift)| {
            let k = idx.index(c.len());
            c[k] = 3 * c[k] + r;
            let c: Vec<i64> = c.iter().map(|x| x * 3i64.pow(shift)).collect();
            IwasawaElement1::from_ints(P, &c, 40, 30).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scalar_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!(a.mul(&b.add(&c)).agrees_with(&a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.add(&b).sub(&b).agrees_with(&a));
        prop_assert!(a.mul(&b).agrees_with(&b.mul(&a)));
    }

    #[test]
    fn scalar_inverse(a in scalar()) {
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        let one = PadicScalar::from_int(P, 1, 1000);
        prop_assert!(a.mul(&inv).agrees_with(&one));
        prop_assert_eq!(inv.valuation(), a.valuation().map(|v| -v));
    }

    #[test]
    fn series_inverse_of_units(mut c in prop::collection::vec(-60i64..60, 1..8), r in 1i64..3) {
        c[0] = 3 * c[0] + r;
        let f = IwasawaElement1::from_ints(P, &c, 40, 30).unwrap();
        let one = IwasawaElement1::from_ints(P, &[1], 40, 30).unwrap();
        prop_assert!(f.mul(&f.inverse().unwrap()).agrees_with(&one));
    }

    #[test]
    fn preparation_recovers_the_series(f in poly(6)) {
        let w = weierstrass_prepare(&f).unwrap();
        let profile = newton_invariants(&f).unwrap();
        prop_assert_eq!(w.mu, profile.mu);
        prop_assert_eq!(w.distinguished.degree(), Some(profile.lambda));
        let p_mu = IwasawaElement1::from_ints(P, &[3i64.pow(w.mu as u32)], 40, 30).unwrap();
        prop_assert!(p_mu.mul(&w.unit).mul(&w.distinguished).agrees_with(&f));
        prop_assert!(newton_invariants(&w.unit).unwrap().is_unit());
    }
}
