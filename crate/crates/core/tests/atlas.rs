use nalgebra::Matrix2;
use noricert_core::arith::{int, rat, ComplexRational, Fraction, Rational};
use noricert_core::atlas::{
    chart_cover_indices, chart_membership, chart_verdict, cone_condition, cover_indices_abs2, disjointness_search,
    membership_abs2, negative_definite, overlap_inequalities, overlap_polydisk_check, AtlasError, ChartPoint,
    IntersectionMatrix,
};
use num_traits::Zero;
use proptest::prelude::*;

fn pt(z1: Rational, z2: Rational) -> ChartPoint {
    ChartPoint::real(z1, z2)
}

/// Membership straight from the definition with exact moduli of real points.
fn membership_oracle(m1: &Rational, m2: &Rational, r: &Rational, k: u32) -> bool {
    m2.pow(k as i32 + 2) < r * m1 && m1 < &(r * m2.pow(k as i32))
}

#[test]
fn membership_examples() {
    let r = rat(1, 5);
    assert!(chart_membership(&pt(&r / int(2), int(0)), &r, 0));
    assert!(!chart_membership(&pt(&r / int(2), int(0)), &r, 1));
    let r = rat(1, 2);
    let p = pt(rat(1, 16), rat(1, 4));
    assert!(chart_membership(&p, &r, 1));
    assert!(membership_oracle(&rat(1, 16), &rat(1, 4), &r, 1));
    // Complex points depend only on the moduli.
    let z = ChartPoint::new(
        ComplexRational::new(rat(3, 80), rat(4, 80)),
        ComplexRational::new(int(0), rat(-1, 4)),
    );
    assert!(chart_membership(&z, &r, 1));
}

#[test]
fn cover_examples() {
    let r = rat(1, 5);
    for z1 in [rat(1, 100), rat(1, 7), rat(199, 1000)] {
        let c = chart_cover_indices(&pt(z1, int(0)), &r, 10);
        assert_eq!(c.indices, vec![0]);
        assert!(c.in_region);
    }
    let r = rat(1, 2);
    // |z1| = 1/8 is the shared endpoint of I_0 = (1/8, 1/2) and I_1 = (1/32, 1/8).
    let edge = chart_cover_indices(&pt(rat(1, 8), rat(1, 4)), &r, 10);
    assert!(edge.indices.is_empty());
    let inner = chart_cover_indices(&pt(rat(3, 16), rat(1, 4)), &r, 10);
    assert_eq!(inner.indices, vec![0]);
    let lower = chart_cover_indices(&pt(rat(1, 16), rat(1, 4)), &r, 10);
    assert_eq!(lower.indices, vec![1]);
    // Outside the covered region the result is flagged.
    let out = chart_cover_indices(&pt(rat(3, 4), int(0)), &r, 10);
    assert!(!out.in_region && out.indices.is_empty());
}

#[test]
fn cone_examples() {
    let rho = rat(1, 2);
    assert!(cone_condition(&pt(int(0), rat(1, 3)), 2, &rho));
    assert!(!cone_condition(&pt(rat(1, 9), int(0)), 1, &rho));
    assert!(cone_condition(&pt(rat(1, 3), int(0)), 0, &rho));
    assert!(!cone_condition(&pt(rat(1, 2), int(0)), 0, &rho));
    assert!(!cone_condition(&pt(rat(2, 3), int(0)), 0, &rho));
    let v = chart_verdict(&pt(rat(1, 9), int(0)), &rat(1, 5), &rho, 0);
    assert!(v.in_chart && v.in_cone);
    let v = chart_verdict(&pt(rat(1, 9), int(0)), &rat(1, 5), &rho, 1);
    assert!(!v.in_chart && !v.in_cone);
}

#[test]
fn disjointness_examples() {
    let rep = disjointness_search(&rat(1, 2), 0, 2, 10_000, 7).unwrap();
    assert!(rep.holds(), "{:?}", rep.counterexamples.first());
    assert!(rep.hits > 0);
    let rep = disjointness_search(&int(1), 1, 3, 10_000, 7).unwrap();
    assert!(rep.holds());
    assert_eq!(disjointness_search(&rat(1, 2), 0, 1, 10, 7), Err(AtlasError::AdjacentIndices(0, 1)));
    assert!(matches!(
        disjointness_search(&rat(3, 2), 0, 2, 10, 7),
        Err(AtlasError::RadiusOutOfRange(_))
    ));
}

#[test]
fn disjointness_on_exhaustive_grid() {
    // 100 × 100 rational grid of moduli in (0, 1] for r = 1, charts 1 and 3.
    let r = int(1);
    let mut hits = [0usize; 2];
    for i in 1..=100 {
        for j in 1..=100 {
            let (m1, m2) = (rat(i, 100), rat(j, 100));
            let a = membership_oracle(&m1, &m2, &r, 1);
            let b = membership_oracle(&m1, &m2, &r, 3);
            assert!(!(a && b), "({m1}, {m2})");
            assert_eq!(chart_membership(&pt(m1.clone(), m2.clone()), &r, 1), a);
            assert_eq!(chart_membership(&pt(m1, m2), &r, 3), b);
            hits[0] += a as usize;
            hits[1] += b as usize;
        }
    }
    assert!(hits[0] > 0 && hits[1] > 0);
}

#[test]
fn overlap_examples() {
    let r = rat(1, 5);
    assert!(overlap_inequalities(&ComplexRational::real(rat(1, 10)), &ComplexRational::real(rat(1, 10)), &r));
    assert!(!overlap_inequalities(&ComplexRational::real(r.clone()), &ComplexRational::real(rat(1, 10)), &r));
    let rep = overlap_polydisk_check(&r, 2_000, 3, 4).unwrap();
    assert!(rep.violations.is_empty());
    assert_eq!(rep.inside + rep.outside, 2_000);
    assert!(rep.inside > 0 && rep.outside > 0);
    assert!(overlap_polydisk_check(&int(1), 10, 3, 4).is_err());
}

#[test]
fn definiteness_examples() {
    assert!(negative_definite(&IntersectionMatrix::new(-3, 2, -3)));
    assert!(!negative_definite(&IntersectionMatrix::new(-2, 2, -2)));
    assert!(negative_definite(&IntersectionMatrix::new(-1, 0, -1)));
    assert_eq!(
        IntersectionMatrix::from_entries([[1, 2], [3, 4]]),
        Err(AtlasError::NotSymmetric)
    );
}

fn modulus() -> impl Strategy<Value = Rational> {
    (1i64..=999, 1i64..=6).prop_map(|(n, e)| Rational::new(n.into(), 10i64.pow(e as u32).into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn never_in_two_distant_charts(m1 in modulus(), m2 in modulus(), j in 0u32..5, gap in 2u32..5) {
        let r = rat(1, 5);
        let p = pt(m1, m2);
        prop_assert!(!(chart_membership(&p, &r, j) && chart_membership(&p, &r, j + gap)));
    }

    #[test]
    fn membership_matches_definition(m1 in modulus(), m2 in modulus(), k in 0u32..8) {
        let r = rat(1, 5);
        prop_assert_eq!(chart_membership(&pt(m1.clone(), m2.clone()), &r, k), membership_oracle(&m1, &m2, &r, k));
    }

    /// Points of the covered region lie in a nonempty contiguous run of charts.
    #[test]
    fn cover_is_contiguous_and_nonempty(
        u in 1i64..1000,
        v in 0i64..1000,
    ) {
        let r = rat(1, 5);
        let m1 = &r * rat(u, 1000);
        let m2 = &r * &r * rat(v, 1000);
        let sq = |q: &Rational| Fraction::from_rational(&(q * q));
        let c = cover_indices_abs2(&sq(&m1), &sq(&m2), &sq(&r), 200);
        prop_assert!(c.in_region);
        prop_assert!(!c.indices.is_empty() || c.truncated);
        prop_assert!(c.is_contiguous());
        for k in &c.indices {
            prop_assert!(membership_oracle(&m1, &m2, &r, *k));
        }
    }

    /// Negative definiteness agrees with both eigenvalues being negative.
    #[test]
    fn definiteness_matches_eigenvalues(a in -9i64..=9, b in -9i64..=9, d in -9i64..=9) {
        let m = IntersectionMatrix::new(a, b, d);
        let eig = Matrix2::new(a as f64, b as f64, b as f64, d as f64).symmetric_eigenvalues();
        let oracle = eig.iter().all(|&x| x < -1e-9);
        prop_assert_eq!(negative_definite(&m), oracle);
    }

    /// Under (z1, z2) ↦ (t^{k+1} z1, t z2) the left side of the cone
    /// inequality gains |t|^{4k+4} and the right side |t|^{4k+2}, so
    /// shrinking by |t| ≤ 1 preserves the condition.
    #[test]
    fn cone_survives_weighted_shrinking(u in 1i64..50, v in 1i64..50, t in 1i64..=7, k in 0u32..4) {
        let rho = rat(1, 2);
        let (z1, z2) = (rat(u, 97), rat(v, 53));
        let t = rat(t, 7);
        let scaled = pt(&z1 * t.pow(k as i32 + 1), &z2 * &t);
        if cone_condition(&pt(z1, z2), k, &rho) {
            prop_assert!(cone_condition(&scaled, k, &rho));
        }
    }

    #[test]
    fn membership_abs2_agrees_with_points(m1 in modulus(), m2 in modulus(), k in 0u32..6) {
        let r = rat(1, 3);
        let sq = |q: &Rational| Fraction::from_rational(&(q * q));
        prop_assert_eq!(
            membership_abs2(&sq(&m1), &sq(&m2), &sq(&r), k),
            chart_membership(&pt(m1, m2), &r, k)
        );
    }
}

#[test]
fn origin_is_flagged() {
    assert!(pt(Rational::zero(), Rational::zero()).is_origin());
}
