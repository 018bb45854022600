use noricert_core::arith::{abs2, int, rat, ComplexFraction, ComplexRational, Fraction, Rational};
use noricert_core::family::{build_family, FamilyParams};
use noricert_core::interval::{ComplexInterval, Interval};
use noricert_core::poly::Poly;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn p(coeffs: &[i64]) -> Poly {
    Poly::from_ints(coeffs)
}

fn family(n: u32) -> noricert_core::family::Family {
    build_family(FamilyParams::derive(n, rat(1, 5), rat(1, 2), None).unwrap()).unwrap()
}

fn c(re: Rational, im: Rational) -> ComplexRational {
    ComplexRational::new(re, im)
}

#[test]
fn difference_of_squares() {
    assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
}

#[test]
fn adding_zero_is_identity() {
    let q = p(&[3, 0, -2, 7]);
    assert_eq!(&q + &Poly::zero(), q);
}

#[test]
fn square_of_p2_for_n3() {
    let fam = family(3);
    let e = fam.params.eps.clone();
    let e4 = e.pow(4);
    let expected = Poly::new(vec![e4.clone() * &e4, -(int(2) * &e4), int(1)]);
    assert_eq!(fam.pk(2) * fam.pk(2), expected);
}

#[test]
fn division_examples() {
    let (q, r) = p(&[-1, 0, 1]).divrem(&p(&[-1, 1])).unwrap();
    assert_eq!((q, r), (p(&[1, 1]), Poly::zero()));

    let (q, r) = p(&[1, 0, 1]).divrem(&Poly::x()).unwrap();
    assert_eq!((q, r), (Poly::x(), p(&[1])));

    assert!(p(&[1, 1]).divrem(&Poly::zero()).is_err());
}

#[test]
fn lemma_division_example_n3() {
    // Independent expansion: ε³·P_1 − λ with P_1 = λ³ − ε⁴λ² + ε, and the
    // claimed factorization P_2·(1 − ε³λ²) with P_2 = ε⁴ − λ.
    let fam = family(3);
    let e = fam.params.eps.clone();
    let e3 = e.pow(3);
    let p1 = Poly::new(vec![e.clone(), int(0), -e.pow(4), int(1)]);
    let p2 = Poly::new(vec![e.pow(4), int(-1)]);
    assert_eq!(fam.pk(1), &p1);
    assert_eq!(fam.pk(2), &p2);
    let dividend = &p1.scale(&e3) - &Poly::x();
    let (q, r) = dividend.divrem(&p2).unwrap();
    assert!(r.is_zero());
    assert_eq!(q, Poly::new(vec![int(1), int(0), -e3.clone()]));
    assert_eq!(&p2 * &q, dividend);
}

#[test]
fn evaluation_examples() {
    let i = ComplexRational::i();
    assert_eq!(p(&[-1, 0, 1]).eval(&i), ComplexRational::real(int(-2)));
    assert_eq!(Poly::zero().eval(&c(rat(3, 7), rat(-1, 2))), ComplexRational::zero());
    let fam = family(2);
    let eps = ComplexRational::real(fam.params.eps.clone());
    assert!(fam.pk(1).eval(&eps).is_zero());
}

#[test]
fn abs2_examples() {
    assert_eq!(abs2(&c(rat(3, 5), rat(4, 5))), int(1));
    assert_eq!(abs2(&ComplexRational::zero()), int(0));
    assert_eq!(abs2(&c(int(1), int(1))), int(2));
}

#[test]
fn gcd_examples() {
    assert_eq!(Poly::gcd(&p(&[-1, 0, 1]), &p(&[-1, 1])).unwrap(), p(&[-1, 1]));
    let fam = family(3);
    let g = Poly::gcd(fam.pk(1), fam.pk(2)).unwrap();
    assert_eq!(g.degree(), Some(0));
    let q = p(&[2, -3, 0, 4]);
    let g = Poly::gcd(&q, &q).unwrap();
    assert_eq!(g, q.monic());
    assert!(Poly::gcd(&Poly::zero(), &Poly::zero()).is_err());
}

#[test]
fn polynomial_text_form() {
    let json = serde_json::to_string(&Poly::x()).unwrap();
    assert_eq!(json, r#"["0/1","1/1"]"#);
    let back: Poly = serde_json::from_str(&json).unwrap();
    assert_eq!(back, Poly::x());
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 0..6).prop_map(Poly::new)
}

fn complex() -> impl Strategy<Value = ComplexRational> {
    (small_rational(), small_rational()).prop_map(|(a, b)| c(a, b))
}

fn naive_eval(q: &Poly, z: &ComplexRational) -> ComplexRational {
    let mut acc = ComplexRational::zero();
    for (i, a) in q.coeffs().iter().enumerate() {
        acc = &acc + &z.pow(i as u32).scale(a);
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), d in small_poly()) {
        prop_assert_eq!(&(&a + &b) + &d, &a + &(&b + &d));
        prop_assert_eq!(&(&a * &b) * &d, &a * &(&b * &d));
        prop_assert_eq!(&a * &(&b + &d), &(&a * &b) + &(&a * &d));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
            prop_assert_eq!((&a * &b).degree(), Some(da + db));
        }
    }

    #[test]
    fn divrem_round_trip(a in small_poly(), b in small_poly()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        if let Some(dr) = r.degree() {
            prop_assert!(dr < b.degree().unwrap());
        }
    }

    #[test]
    fn abs2_is_multiplicative(z in complex(), w in complex()) {
        prop_assert_eq!(abs2(&(&z * &w)), abs2(&z) * abs2(&w));
        prop_assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn horner_matches_naive(q in small_poly(), z in complex()) {
        prop_assert_eq!(q.eval(&z), naive_eval(&q, &z));
    }

    #[test]
    fn unreduced_fractions_agree_with_rationals(a in small_rational(), b in small_rational()) {
        let (fa, fb) = (Fraction::from_rational(&a), Fraction::from_rational(&b));
        prop_assert_eq!((&fa * &fb).to_rational(), &a * &b);
        prop_assert_eq!((&fa + &fb).to_rational(), &a + &b);
        prop_assert_eq!(fa.cmp(&fb), a.cmp(&b));
    }

    #[test]
    fn intervals_enclose_exact_results(a in small_rational(), b in small_rational(), e in 0u32..12) {
        let (ia, ib) = (Interval::from_rational(&a), Interval::from_rational(&b));
        prop_assert!(ia.mul(&ib).contains(&(&a * &b)));
        prop_assert!(ia.add(&ib).contains(&(&a + &b)));
        prop_assert!(ia.sub(&ib).contains(&(&a - &b)));
        prop_assert!(ia.pow(e).contains(&a.pow(e as i32)));
        // A decided comparison always agrees with the exact one.
        if let Some(lt) = ia.lt(&ib) {
            prop_assert_eq!(lt, a < b);
        }
    }

    #[test]
    fn complex_intervals_enclose_abs2(z in complex(), w in complex(), k in 0u32..5) {
        let (fz, fw) = (ComplexFraction::from_complex(&z), ComplexFraction::from_complex(&w));
        let (iz, iw) = (ComplexInterval::from_fraction(&fz), ComplexInterval::from_fraction(&fw));
        let exact = abs2(&(&w.pow(k + 1) - &z));
        prop_assert!(iw.pow(k + 1).sub(&iz).abs2().contains(&exact));
    }
}

#[test]
fn intervals_survive_extreme_magnitudes() {
    let tiny = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 3000));
    let x = &tiny * &rat(7, 3);
    let i = Interval::from_rational(&x);
    assert!(i.contains(&x));
    assert!(i.pow(5).contains(&x.pow(5)));
    assert_eq!(Interval::from_rational(&Rational::zero()).lt(&i), Some(true));
}
