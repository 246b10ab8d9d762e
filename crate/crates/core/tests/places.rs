use adelic::arith::{GaussianRational, QuadraticElement, Rational, RationalFunction};
use adelic::curve::{
    defect_quadratic, family_defect, symbolic_rational_defect, AdelicCurve, IntegrationConfig,
};
use adelic::pav::{
    in_kernel, is_finite, log_pav_eval, parse_place, split_rational_place, splitting, BasePlace,
    FieldElement, Place, Splitting,
};
use adelic::Error;
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #[test]
    fn product_formula_over_q(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
        prop_assume!(n != 0);
        let q = rat(n, d);
        prop_assert!(symbolic_rational_defect(&q).unwrap().is_empty());
        let rep = AdelicCurve::rational().defect(&FieldElement::Rational(q)).unwrap();
        prop_assert!(rep.total.abs() < 1e-10);
    }

    #[test]
    fn quadratic_product_formula(a in -500i64..500, b in -500i64..500, c in 1i64..200) {
        prop_assume!(a != 0 || b != 0);
        for d in [-1i64, -3, 5, -5, 2, 7] {
            let x = QuadraticElement::new(d, rat(a, c), rat(b, c));
            prop_assert!(defect_quadratic(&x).unwrap().total.abs() < 1e-10);
        }
    }

    #[test]
    fn places_multiplicative(a in 1i64..300, b in -300i64..300, c in 1i64..300, e in -300i64..300) {
        let d = -5;
        let x = QuadraticElement::new(d, rat(a, 7), rat(b, 3));
        let y = QuadraticElement::new(d, rat(c, 11), rat(e, 2));
        let xy = x.mul(&y).unwrap();
        for p in [2u64, 3, 7, 29] {
            for (pl, _) in split_rational_place(d, BasePlace::Finite(p)).unwrap() {
                let lx = log_pav_eval(&pl, &FieldElement::Quadratic(x.clone())).unwrap();
                let ly = log_pav_eval(&pl, &FieldElement::Quadratic(y.clone())).unwrap();
                let lxy = log_pav_eval(&pl, &FieldElement::Quadratic(xy.clone())).unwrap();
                prop_assert!((lxy - lx - ly).abs() < 1e-9, "{pl}");
            }
        }
    }
}

#[test]
fn split_weights_sum_to_one() {
    for d in [-1i64, -3, 5, -5] {
        for p in adelic::arith::factor::primes_up_to(100) {
            let parts = split_rational_place(d, BasePlace::Finite(p)).unwrap();
            let total: Rational = parts.iter().map(|(_, w)| w.clone()).sum();
            assert!(total.is_one(), "d={d} p={p}");
        }
        let inf = split_rational_place(d, BasePlace::Infinite).unwrap();
        assert!(inf
            .iter()
            .map(|(_, w)| w.clone())
            .sum::<Rational>()
            .is_one());
    }
}

#[test]
fn splitting_types() {
    assert_eq!(
        splitting(-1, BasePlace::Finite(5)).unwrap(),
        Splitting::Split
    );
    assert_eq!(
        splitting(-1, BasePlace::Finite(3)).unwrap(),
        Splitting::Inert
    );
    assert_eq!(
        splitting(-1, BasePlace::Finite(2)).unwrap(),
        Splitting::Ramified
    );
    assert_eq!(
        splitting(5, BasePlace::Finite(2)).unwrap(),
        Splitting::Inert
    );
    assert_eq!(
        splitting(-7, BasePlace::Finite(2)).unwrap(),
        Splitting::Split
    );
    assert_eq!(splitting(5, BasePlace::Infinite).unwrap(), Splitting::Real);
    assert_eq!(
        splitting(-3, BasePlace::Infinite).unwrap(),
        Splitting::Complex
    );
    assert!(splitting(4, BasePlace::Finite(3)).is_err());
}

#[test]
fn interior_place_behaves_like_an_absolute_value() {
    let place = Place::nevanlinna_interior(GaussianRational::zero(), rat(1, 1)).unwrap();
    let z: RationalFunction = "z".parse().unwrap();
    let inv = z.inv().unwrap();
    assert!(!in_kernel(&place, &FieldElement::Meromorphic(z.clone())).unwrap());
    assert_eq!(
        log_pav_eval(&place, &FieldElement::Meromorphic(z)).unwrap(),
        -1.0
    );
    assert!(in_kernel(&place, &FieldElement::Meromorphic(RationalFunction::zero())).unwrap());
    assert!(is_finite(&place, &FieldElement::Meromorphic(inv.clone())).unwrap());
    assert_eq!(
        log_pav_eval(&place, &FieldElement::Meromorphic(inv)).unwrap(),
        1.0
    );
}

#[test]
fn place_keys_round_trip() {
    for s in ["p=5", "inf", "quad(d=-1,p=5,#1)", "quad(d=5,inf,#0)"] {
        let p = parse_place(s).unwrap();
        assert_eq!(parse_place(&p.key()).unwrap(), p);
    }
}

#[test]
fn jensen_family_is_constant_where_no_roots_cross() {
    let f: RationalFunction = "(z-1/2)(z-3)/(z+5)".parse().unwrap();
    let radii: Vec<Rational> = [1, 2]
        .iter()
        .map(|&n| rat(n, 1))
        .chain([rat(9, 2)])
        .collect();
    let rows = family_defect(&f, &radii, &IntegrationConfig::default());
    for row in rows {
        let rep = row.result.unwrap();
        let gap = rep.gap.unwrap();
        assert!(gap.abs() < 1e-10, "R={} gap {gap}", row.radius);
    }
}

#[test]
fn jensen_guard_on_circle() {
    let f: RationalFunction = "(z-1)/(z-3)".parse().unwrap();
    let c = AdelicCurve::nevanlinna(rat(1, 1)).unwrap();
    assert!(matches!(
        c.defect(&FieldElement::Meromorphic(f)),
        Err(Error::NumericalGuard(_))
    ));
    let g: RationalFunction = "(z-1)/(z-3)".parse().unwrap();
    let c = AdelicCurve::nevanlinna(rat(2, 1)).unwrap();
    let rep = c.defect(&FieldElement::Meromorphic(g)).unwrap();
    assert!((rep.total + 3f64.ln()).abs() < 1e-8);
}
