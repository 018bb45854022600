//! Chart combinatorics of the blow-up chain in base affine coordinates
//! `(z1, z2)`. Chart `k` (minus the exceptional line) is
//! `|z2|^{k+2} < r|z1|` and `|z1| < r|z2|^k`; its cone neighbourhood adds
//! `|z1|² < ρ|z2^{k+1} − z1|·|z2|^k`. Every predicate compares squared
//! moduli exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, int, ComplexFraction, ComplexRational, Fraction, Rational};
use crate::certificate::{sha256_hex, Certificate, CertificateKind};
use crate::interval::{decide_le, decide_lt, ComplexInterval, Interval};
use crate::sampling::{block_count, block_range, Sampler};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub z1: ComplexRational,
    pub z2: ComplexRational,
}

impl ChartPoint {
    pub fn new(z1: ComplexRational, z2: ComplexRational) -> Self {
        Self { z1, z2 }
    }

    pub fn real(z1: Rational, z2: Rational) -> Self {
        Self::new(ComplexRational::real(z1), ComplexRational::real(z2))
    }

    pub fn is_origin(&self) -> bool {
        self.z1.is_zero() && self.z2.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartVerdict {
    pub k: u32,
    pub in_chart: bool,
    pub in_cone: bool,
}

/// Symmetric 2×2 integer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionMatrix {
    entries: [[i64; 2]; 2],
}

impl IntersectionMatrix {
    pub fn new(a: i64, b: i64, d: i64) -> Self {
        Self {
            entries: [[a, b], [b, d]],
        }
    }

    pub fn from_entries(entries: [[i64; 2]; 2]) -> Result<Self, AtlasError> {
        if entries[0][1] != entries[1][0] {
            return Err(AtlasError::NotSymmetric);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    pub fn det(&self) -> i128 {
        let [[a, b], [_, d]] = self.entries;
        a as i128 * d as i128 - b as i128 * b as i128
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("intersection matrix is not symmetric")]
    NotSymmetric,
    #[error("chart indices {0} and {1} are not at distance ≥ 2")]
    AdjacentIndices(u32, u32),
    #[error("radius must satisfy 0 < r ≤ 1, got {0}")]
    RadiusOutOfRange(String),
}

/// Membership from squared moduli `a = |z1|²`, `b = |z2|²`, `r2 = r²`.
pub fn membership_abs2(a: &Fraction, b: &Fraction, r2: &Fraction, k: u32) -> bool {
    let (ai, bi, r2i) = (Interval::from_fraction(a), Interval::from_fraction(b), Interval::from_fraction(r2));
    membership_guarded(a, b, r2, k, &ai, &bi, &r2i, &bi.pow(k))
}

#[allow(clippy::too_many_arguments)]
fn membership_guarded(
    a: &Fraction,
    b: &Fraction,
    r2: &Fraction,
    k: u32,
    ai: &Interval,
    bi: &Interval,
    r2i: &Interval,
    bki: &Interval,
) -> bool {
    decide_lt(&bki.mul(bi).mul(bi), &r2i.mul(ai), || {
        &b.pow(k + 2) < &(r2 * a)
    }) && decide_lt(ai, &r2i.mul(bki), || *a < r2 * &b.pow(k))
}

pub fn chart_membership(p: &ChartPoint, r: &Rational, k: u32) -> bool {
    let (a, b) = squared(p);
    membership_abs2(&a, &b, &Fraction::from_rational(&(r * r)), k)
}

fn squared(p: &ChartPoint) -> (Fraction, Fraction) {
    (
        Fraction::from_rational(&p.z1.abs2()),
        Fraction::from_rational(&p.z2.abs2()),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub indices: Vec<u32>,
    /// The point satisfies `0 < |z1| < r`, `|z2| ≤ r²`.
    pub in_region: bool,
    /// The scan stopped at `k_max` while larger indices could still apply.
    pub truncated: bool,
}

impl CoverResult {
    pub fn is_contiguous(&self) -> bool {
        self.indices.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

/// Chart indices `k ≤ k_max` containing a point given by squared moduli.
/// Outside the covered region the result is empty with `in_region = false`.
pub fn cover_indices_abs2(a: &Fraction, b: &Fraction, r2: &Fraction, k_max: u32) -> CoverResult {
    let (ai, bi, r2i) = (Interval::from_fraction(a), Interval::from_fraction(b), Interval::from_fraction(r2));
    let r4 = r2 * r2;
    let in_region = a.is_positive()
        && decide_lt(&ai, &r2i, || a < r2)
        && decide_le(&bi, &r2i.sqr(), || *b <= r4);
    let mut indices = Vec::new();
    let mut truncated = false;
    if in_region {
        // |z1| < r|z2|^k fails for every larger k once it fails, as |z2| < 1.
        let mut bki = Interval::one();
        for k in 0..=k_max + 1 {
            if !decide_lt(&ai, &r2i.mul(&bki), || *a < r2 * &b.pow(k)) {
                break;
            }
            if k > k_max {
                truncated = true;
                break;
            }
            if membership_guarded(a, b, r2, k, &ai, &bi, &r2i, &bki) {
                indices.push(k);
            }
            bki = bki.mul(&bi);
        }
    }
    CoverResult {
        indices,
        in_region,
        truncated,
    }
}

pub fn chart_cover_indices(p: &ChartPoint, r: &Rational, k_max: u32) -> CoverResult {
    let (a, b) = squared(p);
    cover_indices_abs2(&a, &b, &Fraction::from_rational(&(r * r)), k_max)
}

/// Cone inequality for values already in unreduced form.
pub fn cone_condition_fraction(z1: &ComplexFraction, z2: &ComplexFraction, k: u32, rho2: &Fraction) -> bool {
    let (w1, w2) = (ComplexInterval::from_fraction(z1), ComplexInterval::from_fraction(z2));
    let lhs = w1.abs2().sqr();
    let rhs = Interval::from_fraction(rho2)
        .mul(&w2.pow(k + 1).sub(&w1).abs2())
        .mul(&w2.abs2().pow(k));
    decide_lt(&lhs, &rhs, || {
        let a = z1.abs2();
        let diff = &z2.pow(k + 1) - z1;
        &a * &a < &(rho2 * &diff.abs2()) * &z2.abs2().pow(k)
    })
}

pub fn cone_condition(p: &ChartPoint, k: u32, rho: &Rational) -> bool {
    cone_condition_fraction(
        &ComplexFraction::from_complex(&p.z1),
        &ComplexFraction::from_complex(&p.z2),
        k,
        &Fraction::from_rational(&(rho * rho)),
    )
}

pub fn chart_verdict(p: &ChartPoint, r: &Rational, rho: &Rational, k: u32) -> ChartVerdict {
    let in_chart = chart_membership(p, r, k);
    ChartVerdict {
        k,
        in_chart,
        in_cone: in_chart && cone_condition(p, k, rho),
    }
}

pub fn negative_definite(m: &IntersectionMatrix) -> bool {
    m.entries[0][0] < 0 && m.det() > 0
}

/// Moduli `(|z1|, |z2|)` of a random point of the covered region. Chart
/// predicates only see moduli, so searches draw these directly; `|z2|` is
/// uniform or on a compressed scale, and `|z1|` is biased into the windows
/// `(|z2|^{k+2}/r, r|z2|^k)` of the indices in `focus`.
fn covered_moduli(s: &mut Sampler, r: &Fraction, r_inv: &Fraction, focus: &[u32]) -> (Fraction, Fraction) {
    let mut m2 = &(r * r) * &s.unit_fraction();
    if s.coin() {
        m2 = &m2 * &s.unit_fraction().pow(3);
    }
    let choice = s.below(focus.len() as u64 + 1) as usize;
    let m1 = match focus.get(choice) {
        Some(&k) => {
            let mk = m2.pow(k);
            let lo = &(&(&mk * &m2) * &m2) * r_inv;
            let hi = r * &mk;
            &lo + &(&(&hi - &lo) * &s.unit_fraction())
        }
        None => r * &s.unit_fraction(),
    };
    (m1, m2)
}

fn inverse(q: &Rational) -> Fraction {
    Fraction::new(q.denom().clone(), q.numer().clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub j: u32,
    pub k: u32,
    pub samples: usize,
    pub seed: u64,
    /// Points found in both charts (any entry refutes).
    pub counterexamples: Vec<ChartPoint>,
    /// Samples where the contradiction chain did not evaluate as expected.
    pub chain_failures: usize,
    /// Samples that landed in at least one of the two charts.
    pub hits: usize,
}

impl DisjointnessReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty() && self.chain_failures == 0
    }
}

/// Randomized search for a point in charts `j` and `k`, `|j − k| ≥ 2`.
/// Besides membership, each sample evaluates the contradiction chain:
/// membership in the higher chart forces `|z2| < r`, so
/// `r⁴·|z2|^{2(k−j−2)} ≤ 1`, while membership in both would need the reverse
/// strict inequality.
pub fn disjointness_search(
    r: &Rational,
    j: u32,
    k: u32,
    samples: usize,
    seed: u64,
) -> Result<DisjointnessReport, AtlasError> {
    let (lo, hi) = if j < k { (j, k) } else { (k, j) };
    if hi - lo < 2 {
        return Err(AtlasError::AdjacentIndices(j, k));
    }
    if !(r > &int(0) && r <= &int(1)) {
        return Err(AtlasError::RadiusOutOfRange(format_rational(r)));
    }
    let rf = Fraction::from_rational(r);
    let r_inv = inverse(r);
    let r2 = &rf * &rf;
    let r4 = &r2 * &r2;
    let gap = hi - lo - 2;
    let blocks: Vec<(Vec<ChartPoint>, usize, usize)> = (0..block_count(samples))
        .into_par_iter()
        .map(|blk| {
            let mut s = Sampler::new(seed, blk as u64);
            let mut found = Vec::new();
            let mut chain_failures = 0;
            let mut hits = 0;
            for _ in block_range(blk, samples) {
                let (m1, m2) = covered_moduli(&mut s, &rf, &r_inv, &[lo, hi]);
                let (a, b) = (&m1 * &m1, &m2 * &m2);
                let in_lo = membership_abs2(&a, &b, &r2, lo);
                let in_hi = membership_abs2(&a, &b, &r2, hi);
                if in_lo || in_hi {
                    hits += 1;
                }
                if in_lo && in_hi {
                    found.push(ChartPoint::real(m1.to_rational(), m2.to_rational()));
                    continue;
                }
                if in_hi && !(b < r2) {
                    chain_failures += 1;
                }
                if b < r2 && &r4 * &b.pow(gap) > Fraction::one() {
                    chain_failures += 1;
                }
            }
            (found, chain_failures, hits)
        })
        .collect();
    let mut report = DisjointnessReport {
        j,
        k,
        samples,
        seed,
        counterexamples: Vec::new(),
        chain_failures: 0,
        hits: 0,
    };
    for (found, fails, hits) in blocks {
        report.counterexamples.extend(found);
        report.chain_failures += fails;
        report.hits += hits;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub samples: usize,
    pub seed: u64,
    pub max_index: u32,
    pub inside: usize,
    pub outside: usize,
    /// `(x, y)` pairs where polydisk membership and chart membership disagree.
    pub violations: Vec<(ComplexRational, ComplexRational)>,
}

/// The four inequalities `|y| < r`, `|x²y| < r`, `|xy²| < r`, `|x| < r`.
pub fn overlap_inequalities(x: &ComplexRational, y: &ComplexRational, r: &Rational) -> bool {
    let r2 = r * r;
    let ax = x.abs2();
    let ay = y.abs2();
    ay < r2 && &ax * &ax * &ay < r2 && &ax * &ay * &ay < r2 && ax < r2
}

/// Checks that charts `k` and `k+1` meet exactly in the polydisk
/// `|x| < r, |y| < r` under `z2 = xy`, `z1 = x^{k+2}y^{k+1}` (for `k = 0` this
/// is `z1 = x²y`), for `k ≤ max_index`. Half of the samples lie in the
/// polydisk, half outside it (including its boundary).
pub fn overlap_polydisk_check(r: &Rational, samples: usize, seed: u64, max_index: u32) -> Result<OverlapReport, AtlasError> {
    if !(r > &int(0) && r < &int(1)) {
        return Err(AtlasError::RadiusOutOfRange(format_rational(r)));
    }
    let rf2 = Fraction::from_rational(&(r * r));
    let parts: Vec<(usize, usize, Vec<(ComplexRational, ComplexRational)>)> = (0..block_count(samples))
        .into_par_iter()
        .map(|blk| {
            let mut s = Sampler::new(seed, blk as u64);
            let (mut inside, mut outside, mut bad) = (0, 0, Vec::new());
            for i in block_range(blk, samples) {
                let (mx, my) = if i % 2 == 0 {
                    (r * s.unit(), r * s.unit())
                } else {
                    let big = if s.below(8) == 0 { r.clone() } else { r * (int(1) + s.unit()) };
                    if s.coin() {
                        (big, r * s.unit())
                    } else {
                        (r * s.unit(), big)
                    }
                };
                let expected = mx < *r && my < *r;
                if expected {
                    inside += 1;
                } else {
                    outside += 1;
                }
                let x = s.with_modulus(&mx);
                let y = s.with_modulus(&my);
                let mut ok = overlap_inequalities(&x, &y, r) == expected;
                // k = 0 through the complex substitution, higher k through
                // moduli, as |x^{k+2}y^{k+1}|² = |x|^{2(k+2)}|y|^{2(k+1)}.
                let (xf, yf) = (ComplexFraction::from_complex(&x), ComplexFraction::from_complex(&y));
                let z2 = &xf * &yf;
                let z1 = &xf * &z2;
                let (a0, b0) = (z1.abs2(), z2.abs2());
                ok &= (membership_abs2(&a0, &b0, &rf2, 0) && membership_abs2(&a0, &b0, &rf2, 1)) == expected;
                let ax = Fraction::from_rational(&(&mx * &mx));
                let ay = Fraction::from_rational(&(&my * &my));
                let b = &ax * &ay;
                let mut a = &(&ax * &ax) * &ay;
                for k in 0..=max_index {
                    let both = membership_abs2(&a, &b, &rf2, k) && membership_abs2(&a, &b, &rf2, k + 1);
                    ok &= both == expected;
                    a = &a * &b;
                }
                if !ok {
                    bad.push((x, y));
                }
            }
            (inside, outside, bad)
        })
        .collect();
    let mut report = OverlapReport {
        samples,
        seed,
        max_index,
        inside: 0,
        outside: 0,
        violations: Vec::new(),
    };
    for (i, o, v) in parts {
        report.inside += i;
        report.outside += o;
        report.violations.extend(v);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub seed: u64,
    pub empty: usize,
    pub non_contiguous: usize,
    pub max_index_seen: u32,
}

/// Random points of the covered region each lie in a nonempty contiguous run
/// of charts.
pub fn coverage_search(r: &Rational, samples: usize, seed: u64, k_max: u32) -> CoverageReport {
    let rf = Fraction::from_rational(r);
    let r_inv = inverse(r);
    let r2 = &rf * &rf;
    let focus: Vec<u32> = (0..=k_max.min(8)).collect();
    let parts: Vec<(usize, usize, u32)> = (0..block_count(samples))
        .into_par_iter()
        .map(|blk| {
            let mut s = Sampler::new(seed, blk as u64);
            let (mut empty, mut gaps, mut top) = (0, 0, 0);
            for _ in block_range(blk, samples) {
                let (m1, m2) = covered_moduli(&mut s, &rf, &r_inv, &focus);
                let c = cover_indices_abs2(&(&m1 * &m1), &(&m2 * &m2), &r2, k_max);
                if c.indices.is_empty() && !c.truncated {
                    empty += 1;
                }
                if !c.is_contiguous() {
                    gaps += 1;
                }
                top = top.max(c.indices.last().copied().unwrap_or(0));
            }
            (empty, gaps, top)
        })
        .collect();
    let mut rep = CoverageReport {
        samples,
        seed,
        empty: 0,
        non_contiguous: 0,
        max_index_seen: 0,
    };
    for (e, g, t) in parts {
        rep.empty += e;
        rep.non_contiguous += g;
        rep.max_index_seen = rep.max_index_seen.max(t);
    }
    rep
}

/// Settings for [`atlas_certificates`].
#[derive(Debug, Clone)]
pub struct AtlasPlan {
    pub r: Rational,
    pub rho: Rational,
    pub seed: u64,
    pub samples: usize,
    /// Largest chart index used in pairwise and overlap checks.
    pub max_index: u32,
}

/// Chart-level certificates shared by every `n`: covering, pairwise
/// disjointness, the overlap polydisk, and the two intersection matrices.
pub fn atlas_certificates(plan: &AtlasPlan) -> Vec<Certificate> {
    let tag = sha256_hex(
        format!(
            "atlas r={} rho={}",
            format_rational(&plan.r),
            format_rational(&plan.rho)
        )
        .as_bytes(),
    );
    let mut out = Vec::new();

    let cov = coverage_search(&plan.r, plan.samples, plan.seed, 64);
    let mut c = Certificate::new(CertificateKind::ChartCovering, "k ≤ 64", &tag);
    c.check(
        format!("{} points covered", cov.samples),
        cov.empty == 0,
        format!("{} uncovered", cov.empty),
    );
    c.check("covering runs contiguous", cov.non_contiguous == 0, format!("{} gaps", cov.non_contiguous));
    out.push(c);

    for j in 0..=plan.max_index {
        for k in j + 2..=plan.max_index {
            let mut c = Certificate::new(CertificateKind::Disjointness, format!("j={j},k={k}"), &tag);
            match disjointness_search(&plan.r, j, k, plan.samples, plan.seed) {
                Ok(rep) => {
                    c.counterexamples = rep.counterexamples.iter().map(|p| p.z1.clone()).collect();
                    c.check(
                        format!("no common point in {} samples ({} chart hits)", rep.samples, rep.hits),
                        rep.counterexamples.is_empty(),
                        "",
                    );
                    c.check(
                        "contradiction chain r⁴|z2|^(2(k-j-2)) ≤ 1",
                        rep.chain_failures == 0,
                        format!("{} failures", rep.chain_failures),
                    );
                }
                Err(e) => c.absorb("search", &crate::certificate::CertifyError::Inapplicable(e.to_string())),
            }
            out.push(c);
        }
    }

    let mut c = Certificate::new(CertificateKind::OverlapPolydisk, format!("k ≤ {}", plan.max_index), &tag);
    match overlap_polydisk_check(&plan.r, plan.samples, plan.seed, plan.max_index) {
        Ok(rep) => {
            c.check(
                format!("{} inside, {} outside agree with chart membership", rep.inside, rep.outside),
                rep.violations.is_empty(),
                format!("{} violations", rep.violations.len()),
            );
        }
        Err(e) => c.absorb("polydisk", &crate::certificate::CertifyError::Inapplicable(e.to_string())),
    }
    out.push(c);

    let mut c = Certificate::new(CertificateKind::Definiteness, "F0 ∪ F1", &tag);
    let tilde = IntersectionMatrix::new(-3, 2, -3);
    let plain = IntersectionMatrix::new(-2, 2, -2);
    c.check("[[-3,2],[2,-3]] negative definite", negative_definite(&tilde), "det 5");
    c.check("[[-2,2],[2,-2]] not negative definite", !negative_definite(&plain), "det 0");
    out.push(c);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn membership_examples() {
        let r = rat(1, 5);
        let p = ChartPoint::real(&r / int(2), int(0));
        assert!(chart_membership(&p, &r, 0));
        assert!(!chart_membership(&p, &r, 1));
        let q = ChartPoint::real(rat(1, 16), rat(1, 4));
        assert!(chart_membership(&q, &rat(1, 2), 1));
    }

    #[test]
    fn cover_examples() {
        let r = rat(1, 2);
        let p = ChartPoint::real(rat(1, 8), int(0));
        assert_eq!(chart_cover_indices(&p, &r, 10).indices, vec![0]);
        let q = ChartPoint::real(rat(3, 16), rat(1, 4));
        assert_eq!(chart_cover_indices(&q, &r, 10).indices, vec![0]);
        // Shared endpoint of I_0 and I_1 on the edge |z2| = r².
        let shared = ChartPoint::real(rat(1, 8), rat(1, 4));
        let c = chart_cover_indices(&shared, &r, 10);
        assert!(c.in_region && c.indices.is_empty());
        let outside = ChartPoint::real(rat(1, 8), rat(1, 2));
        assert!(!chart_cover_indices(&outside, &r, 10).in_region);
    }

    #[test]
    fn cone_examples() {
        let rho = rat(1, 2);
        let z = ChartPoint::real(int(0), rat(1, 3));
        assert!(cone_condition(&z, 2, &rho));
        let w = ChartPoint::real(rat(1, 10), int(0));
        assert!(!cone_condition(&w, 1, &rho));
        assert!(cone_condition(&w, 0, &rho));
        assert!(!cone_condition(&ChartPoint::real(rat(1, 2), int(0)), 0, &rho));
    }

    #[test]
    fn adjacent_pair_declines() {
        assert_eq!(
            disjointness_search(&rat(1, 2), 0, 1, 10, 0).unwrap_err(),
            AtlasError::AdjacentIndices(0, 1)
        );
    }

    #[test]
    fn matrices() {
        assert!(negative_definite(&IntersectionMatrix::new(-3, 2, -3)));
        assert!(!negative_definite(&IntersectionMatrix::new(-2, 2, -2)));
        assert!(negative_definite(&IntersectionMatrix::new(-1, 0, -1)));
        assert!(IntersectionMatrix::from_entries([[1, 2], [3, 4]]).is_err());
    }

    #[test]
    fn overlap_examples() {
        let r = rat(1, 2);
        let q = rat(1, 4);
        assert!(overlap_inequalities(&ComplexRational::zero(), &ComplexRational::zero(), &r));
        assert!(!overlap_inequalities(&ComplexRational::real(r.clone()), &ComplexRational::zero(), &r));
        assert!(overlap_inequalities(&ComplexRational::real(q.clone()), &ComplexRational::real(q), &r));
    }
}
