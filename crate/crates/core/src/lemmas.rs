//! Certificates for the polynomial estimates of the construction: root
//! localization of the `P_k`, two-sided bounds on the annulus
//! `1 ≤ |λ| ≤ 2`, the inequality chains for `f_1`, `f_2` there, and the
//! divisibility of the shifted products by `P_k`.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{format_rational, int, rat, rpow, Fraction, Rational};
use crate::certificate::{Certificate, CertificateKind, CertifyError};
use crate::circle::CircleSpec;
use crate::family::{has_unit_leading, Family};
use crate::interval::{decide_lt, Interval};
use crate::poly::Poly;
use crate::roots::{count_roots_in_disk, CountHint, RootCountCertificate};

pub type RootResult = Result<RootCountCertificate, CertifyError>;

/// `2^{-k}`.
pub fn dyadic_radius(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// `Π_{j>k} P_j^{j−k} · λ^{n−k}`, the polynomial that `P_k` subtracts from
/// `ε^{c_k}`.
pub fn root_chain_dominant(fam: &Family, k: usize) -> Poly {
    let n = fam.n() as usize;
    let factors: Vec<(usize, u32)> = (k + 1..n).map(|j| (j, (j - k) as u32)).collect();
    fam.product(&factors, n - k)
}

/// Certified root counts of `P_k` in `|λ| < 2^{-k}` for `k = 1..n−1`, by
/// backward induction: `P_{n−1}` is linear, and for smaller `k` the constant
/// `ε^{c_k}` is dominated on `|λ| = 2^{-k}` by the product of the later `P_j`
/// (whose roots are already localized) and `λ^{n−k}`. Index `k − 1` holds `P_k`.
pub fn root_localization(fam: &Family, budget: u64) -> Vec<RootResult> {
    let n = fam.n() as usize;
    let mut out: Vec<Option<RootResult>> = vec![None; n - 1];
    for k in (1..n).rev() {
        let radius = dyadic_radius(k);
        let result = if k == n - 1 {
            count_roots_in_disk(fam.pk(k), &radius, &CountHint::Elementary, budget)
        } else {
            let mut factors = Vec::new();
            let mut missing = None;
            for j in k + 1..n {
                match out[j - 1].as_ref().expect("later index done") {
                    Ok(c) => factors.push((fam.pk(j).clone(), (j - k) as u32, CountHint::Known(c.clone()))),
                    Err(_) => missing = Some(j),
                }
            }
            match missing {
                Some(j) => Err(CertifyError::MissingPrerequisite(format!(
                    "root localization of P_{j}"
                ))),
                None => {
                    factors.push((Poly::monomial(Rational::one(), n - k), 1, CountHint::Elementary));
                    let hint = CountHint::Split {
                        dominant: -&root_chain_dominant(fam, k),
                        hint: Box::new(CountHint::Product(factors)),
                    };
                    count_roots_in_disk(fam.pk(k), &radius, &hint, budget)
                }
            }
        };
        let result = result.and_then(|c| {
            if c.is_complete() {
                Ok(c)
            } else {
                Err(CertifyError::refuted(format!(
                    "only {} of {} roots of P_{k} lie in |λ| < 2^-{k}",
                    c.count,
                    fam.pk(k).degree().unwrap_or(0)
                )))
            }
        });
        out[k - 1] = Some(result);
    }
    out.into_iter().map(|r| r.expect("filled")).collect()
}

pub fn root_localization_records(fam: &Family, roots: &[RootResult]) -> Vec<Certificate> {
    let hash = fam.hash();
    roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let k = i + 1;
            let label = format!("P_{k}");
            match r {
                Ok(c) => c.to_record(&label, &hash),
                Err(e) => {
                    let mut c = Certificate::new(CertificateKind::RootLocalization, label, &hash);
                    c.absorb("root count", e);
                    c
                }
            }
        })
        .collect()
}

/// Per-`k` bounds `lower_k < |P_k(λ)| < upper_k` on `1 ≤ |λ| ≤ 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnulusBounds {
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

/// `(1/2)^{d_k} < |P_k| < 3^{d_k}` on the closed annulus, derived from the
/// root localization: `|P_k(λ)| = Π|λ − root|` for a leading coefficient of
/// modulus one, and each factor lies in `(1/2, 3)` once every root satisfies
/// `|root| < 1/2`. Exact spot checks at `points` circle points per boundary
/// circle back the derivation.
pub fn annulus_bounds_certificate(
    fam: &Family,
    roots: &[RootResult],
    points: usize,
) -> (Certificate, Option<AnnulusBounds>) {
    let n = fam.n() as usize;
    let mut cert = Certificate::new(CertificateKind::AnnulusBounds, format!("n={n}"), &fam.hash());
    let half = rat(1, 2);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for k in 1..n {
        let pk = fam.pk(k);
        let dk = fam.params.d_k(k) as i64;
        let Some(Ok(rc)) = roots.get(k - 1) else {
            cert.absorb(
                &format!("P_{k} prerequisite"),
                &CertifyError::MissingPrerequisite(format!("root localization of P_{k}")),
            );
            return (cert, None);
        };
        cert.check(
            format!("all {} roots of P_{k} in |λ| < {}", rc.count, format_rational(&rc.radius)),
            rc.is_complete() && rc.radius <= half,
            "",
        );
        cert.check(format!("|lc(P_{k})| = 1"), has_unit_leading(pk), "");
        // Factor bounds for |root| < R ≤ 1/2 and 1 ≤ |λ| ≤ 2.
        cert.check(
            format!("|λ − root| > 1 − {} ≥ 1/2", format_rational(&rc.radius)),
            int(1) - &rc.radius >= half,
            "",
        );
        cert.check(
            format!("|λ − root| < 2 + {} < 3", format_rational(&rc.radius)),
            int(2) + &rc.radius < int(3),
            "",
        );
        let lo = rpow(&half, dk);
        let hi = rpow(&int(3), dk);
        let lo2 = Fraction::from_rational(&(&lo * &lo));
        let hi2 = Fraction::from_rational(&(&hi * &hi));
        let scaled = pk.scaled();
        let mut violations = 0usize;
        for radius in [int(1), int(2)] {
            let circle = CircleSpec::new(radius).expect("positive");
            for mu in circle.sample_points(points) {
                let v = scaled.eval(&mu).abs2();
                if !(lo2 < v && v < hi2) {
                    violations += 1;
                    cert.counterexamples.push(mu.to_complex());
                }
            }
        }
        cert.check(
            format!("(1/4)^{dk} < |P_{k}|² < 9^{dk} at {} exact points", 2 * points),
            violations == 0,
            format!("{violations} violations"),
        );
        lower.push(lo);
        upper.push(hi);
    }
    let ok = cert.is_certified();
    (cert, ok.then_some(AnnulusBounds { lower, upper }))
}

/// Rational bounds for `|f_1|`, `|f_2|` valid on `1 ≤ |λ| ≤ 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnulusChains {
    pub f1_lo: Rational,
    pub f1_hi: Rational,
    pub f2_lo: Rational,
    pub f2_hi: Rational,
}

impl AnnulusChains {
    pub fn from_bounds(fam: &Family, b: &AnnulusBounds) -> Self {
        let eps = &fam.params.eps;
        let n = fam.n() as i64;
        let mut f1_lo = eps.clone();
        let mut f1_hi = eps * rpow(&int(2), n);
        let mut f2_lo = eps * eps;
        let mut f2_hi = eps * eps * int(2);
        for (i, (lo, hi)) in b.lower.iter().zip(&b.upper).enumerate() {
            let j = i as i64 + 1;
            f1_lo *= rpow(lo, j);
            f1_hi *= rpow(hi, j);
            f2_lo *= lo;
            f2_hi *= hi;
        }
        Self {
            f1_lo,
            f1_hi,
            f2_lo,
            f2_hi,
        }
    }
}

/// The four annulus inequalities
/// (a) `|f_1| < r/n`, (b) `|f_2| < r²/n`, (c) `|f_2| < |f_1|/n`,
/// (d) `|f_1| > |f_2|^k` for all `k ≥ 1`,
/// certified through the rational chains of [`AnnulusChains`]; (d) follows
/// from `k = 1` together with `|f_2| < 1`, and is additionally checked for
/// `k = 1..2n`. Every inequality is also evaluated exactly at `points`
/// points on each boundary circle.
pub fn corollary_ineq_certificate(
    fam: &Family,
    bounds: Option<&AnnulusBounds>,
    points: usize,
) -> (Certificate, Option<AnnulusChains>) {
    let n = fam.n() as i64;
    let mut cert = Certificate::new(
        CertificateKind::AnnulusInequalities,
        format!("n={n}"),
        &fam.hash(),
    );
    let Some(bounds) = bounds else {
        cert.absorb(
            "annulus bounds",
            &CertifyError::MissingPrerequisite("annulus bounds for P_k".into()),
        );
        return (cert, None);
    };
    let ch = AnnulusChains::from_bounds(fam, bounds);
    let r = &fam.params.r;
    let nn = int(n);
    cert.check("(a) sup|f1| < r/n", ch.f1_hi < r / &nn, "");
    cert.check("(b) sup|f2| < r²/n", ch.f2_hi < r * r / &nn, "");
    cert.check("(c) sup|f2| < inf|f1|/n", ch.f2_hi < &ch.f1_lo / &nn, "");
    cert.check("(d) sup|f2| < 1", ch.f2_hi < int(1), "");
    for k in 1..=2 * n {
        cert.check(
            format!("(d) sup|f2|^{k} < inf|f1|"),
            rpow(&ch.f2_hi, k) < ch.f1_lo,
            "",
        );
    }
    if !cert.is_certified() {
        return (cert, None);
    }
    let f1 = fam.f1_scaled();
    let f2 = fam.f2_scaled();
    let r2 = Fraction::from_rational(&(r * r));
    let n2 = Fraction::from_int(BigInt::from(n * n));
    let r2_iv = Interval::from_fraction(&r2);
    let r4 = &r2 * &r2;
    let r4_iv = Interval::from_fraction(&r4);
    let n2_iv = Interval::from_fraction(&n2);
    let mut bad = [0usize; 4];
    for radius in [int(1), int(2)] {
        let circle = CircleSpec::new(radius).expect("positive");
        for mu in circle.sample_points(points) {
            let a = f1.eval(&mu).abs2();
            let b = f2.eval(&mu).abs2();
            let (ai, bi) = (Interval::from_fraction(&a), Interval::from_fraction(&b));
            if !decide_lt(&ai.mul(&n2_iv), &r2_iv, || &a * &n2 < r2) {
                bad[0] += 1;
            }
            if !decide_lt(&bi.mul(&n2_iv), &r4_iv, || &b * &n2 < r4) {
                bad[1] += 1;
            }
            if !decide_lt(&bi.mul(&n2_iv), &ai, || &b * &n2 < a) {
                bad[2] += 1;
            }
            for k in 1..=2 * n as u32 {
                if !decide_lt(&bi.pow(k), &ai, || b.pow(k) < a) {
                    bad[3] += 1;
                    break;
                }
            }
        }
    }
    for (i, name) in ["(a)", "(b)", "(c)", "(d)"].iter().enumerate() {
        cert.check(
            format!("{name} exact at {} circle points", 2 * points),
            bad[i] == 0,
            format!("{} violations", bad[i]),
        );
    }
    let ok = cert.is_certified();
    (cert, ok.then_some(ch))
}

/// Result of dividing the shifted product by `P_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionOutcome {
    pub dividend: Poly,
    pub quotient: Poly,
    pub remainder: Poly,
}

/// `ε^{2k−1}·Π_{j<k} P_j^{k−j} − Π_{j>k} P_j^{j−k}·λ^{n−k}`.
pub fn shifted_product(fam: &Family, k: usize) -> Poly {
    let head_factors: Vec<(usize, u32)> = (1..k).map(|j| (j, (k - j) as u32)).collect();
    let head = fam
        .product(&head_factors, 0)
        .scale(&fam.params.eps_pow(2 * k as u64 - 1));
    &head - &root_chain_dominant(fam, k)
}

/// Exact check that `P_k` divides [`shifted_product`] for `1 ≤ k ≤ n − 1`.
pub fn lemma_div_check(fam: &Family, k: usize) -> (Certificate, Option<DivisionOutcome>) {
    let n = fam.n() as usize;
    let mut cert = Certificate::new(CertificateKind::Divisibility, format!("k={k}"), &fam.hash());
    if k == 0 || k >= n {
        cert.absorb(
            "index",
            &CertifyError::Inapplicable(format!("k = {k} outside 1..{}", n - 1)),
        );
        return (cert, None);
    }
    let dividend = shifted_product(fam, k);
    let (quotient, remainder) = dividend.divrem(fam.pk(k)).expect("P_k is nonzero");
    cert.check(
        format!("remainder of division by P_{k} is zero"),
        remainder.is_zero(),
        format!("remainder degree {:?}", remainder.degree()),
    );
    if k == 1 {
        cert.check("k = 1: dividend equals P_1", &dividend == fam.pk(1), "");
    }
    let outcome = DivisionOutcome {
        dividend,
        quotient,
        remainder,
    };
    (cert, Some(outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::DEFAULT_BUDGET;
    use crate::family::{build_family, FamilyParams};

    fn family(n: u32) -> Family {
        build_family(FamilyParams::derive(n, rat(1, 5), rat(1, 2), None).unwrap()).unwrap()
    }

    #[test]
    fn div_n3_k2_quotient() {
        let fam = family(3);
        let (cert, out) = lemma_div_check(&fam, 2);
        assert!(cert.is_certified());
        let out = out.unwrap();
        let e3 = fam.params.eps_pow(3);
        // ε³·P_1 − λ = P_2·(1 − ε³λ²)
        assert_eq!(out.dividend, &fam.pk(1).scale(&e3) - &Poly::x());
        assert_eq!(out.quotient, Poly::new(vec![int(1), int(0), -e3]));
    }

    #[test]
    fn div_k1_is_p1() {
        for n in [2, 3] {
            let fam = family(n);
            let (cert, out) = lemma_div_check(&fam, 1);
            assert!(cert.is_certified());
            assert_eq!(out.unwrap().quotient, Poly::one());
        }
    }

    #[test]
    fn roots_localized_n3() {
        let fam = family(3);
        let roots = root_localization(&fam, DEFAULT_BUDGET);
        for (i, r) in roots.iter().enumerate() {
            let c = r.as_ref().unwrap();
            assert_eq!(c.count, fam.params.d[i]);
            assert_eq!(c.radius, dyadic_radius(i + 1));
        }
    }

    #[test]
    fn bounds_and_chains_n2() {
        let fam = family(2);
        let roots = root_localization(&fam, DEFAULT_BUDGET);
        let (cert, bounds) = annulus_bounds_certificate(&fam, &roots, 64);
        assert!(cert.is_certified(), "{cert:?}");
        let bounds = bounds.unwrap();
        assert_eq!(bounds.lower, vec![rat(1, 2)]);
        assert_eq!(bounds.upper, vec![int(3)]);
        let (cert, chains) = corollary_ineq_certificate(&fam, Some(&bounds), 64);
        assert!(cert.is_certified(), "{cert:?}");
        let ch = chains.unwrap();
        // (a) at n = 2: ε·3·4 < r/2.
        assert_eq!(ch.f1_hi, &fam.params.eps * int(12));
        assert!(ch.f1_hi < rat(1, 10));
    }

    #[test]
    fn missing_bounds_is_undecided() {
        let fam = family(2);
        let (cert, chains) = corollary_ineq_certificate(&fam, None, 8);
        assert!(chains.is_none());
        assert!(matches!(cert.verdict, crate::certificate::Verdict::Undecided { .. }));
    }
}
