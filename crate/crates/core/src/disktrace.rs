//! Per-`n` verification of the disk `g_n = (f_1, f_2)`: the annulus image in
//! `K_n`, the chart window, the cone inequalities for every `k < n`, the
//! vanishing orders at 0 with the resulting escape index, and the boundary
//! metric that witnesses uniform convergence.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, int, rational_text, rpow, ComplexFraction, ComplexRational, Fraction, Rational};
use crate::atlas::{cone_condition_fraction, cover_indices_abs2};
use crate::certificate::{Certificate, CertificateKind, CertifyError, Verdict};
use crate::circle::CircleSpec;
use crate::family::Family;
use crate::interval::{decide_le, ComplexInterval, Interval};
use crate::lemmas::{shifted_product, AnnulusBounds, AnnulusChains, RootResult};
use crate::poly::Poly;
use crate::roots::{count_roots_in_disk, CountHint};
use crate::sampling::{block_count, block_range, Sampler};

/// Points per boundary circle for exact spot checks.
pub const CIRCLE_POINTS: usize = 64;
/// Minimum number of accepted samples in each region `Ā_k`.
pub const REGION_SAMPLES: usize = 256;

/// `⌈log10(1/q)⌉` up to one unit, from bit lengths; 1 for `q ≥ 1/10`.
pub fn decimal_depth(q: &Rational) -> u64 {
    let num = q.numer().bits() as i64;
    let den = q.denom().bits() as i64;
    let digits = ((den - num + 1) as f64 * std::f64::consts::LOG10_2).ceil();
    digits.max(1.0) as u64
}

fn pow10_inv(m: u64) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), m as usize))
}

/// Deepest decimal scale worth sampling: a few digits below the disk around 0
/// on which `g_n` lies in chart `n − 1`.
pub fn sample_depth(fam: &Family) -> u64 {
    let n = fam.n() as usize;
    decimal_depth(&fam.params.eps) * fam.params.c_k(n - 1) + 4
}

/// Exact values of `f_1`, `f_2` at `λ`.
#[derive(Debug, Clone)]
pub struct Image {
    pub lambda: ComplexRational,
    pub f1: ComplexFraction,
    pub f2: ComplexFraction,
}

impl Image {
    pub fn at(fam: &Family, lambda: ComplexRational) -> Self {
        let z = ComplexFraction::from_complex(&lambda);
        Self {
            f1: fam.f1_scaled().eval(&z),
            f2: fam.f2_scaled().eval(&z),
            lambda,
        }
    }
}

/// Seeded points of `Δ̄₂ ∖ Z`. Even indices have modulus `2u`; odd indices
/// have modulus `10^{-m}·u` with `m` uniform up to [`sample_depth`], so every
/// chart the disk visits gets samples. Points of `Z` (exact zeros of `f_2`)
/// are dropped and redrawn.
pub fn disk_samples(fam: &Family, count: usize, seed: u64) -> Vec<Image> {
    let depth = sample_depth(fam);
    let two = int(2);
    (0..block_count(count))
        .into_par_iter()
        .flat_map_iter(|blk| {
            let mut s = Sampler::new(seed, blk as u64);
            let mut out = Vec::new();
            for i in block_range(blk, count) {
                loop {
                    let m = if i % 2 == 0 {
                        &two * s.unit()
                    } else {
                        pow10_inv(s.below(depth + 1)) * s.unit()
                    };
                    let lambda = if i % 16 == 0 { ComplexRational::real(two.clone()) } else { s.with_modulus(&m) };
                    let img = Image::at(fam, lambda);
                    if !img.f2.is_zero() {
                        out.push(img);
                        break;
                    }
                }
            }
            out
        })
        .collect()
}

/// Cover indices and cone verdicts of one image point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSample {
    pub indices: Vec<u32>,
    pub in_region: bool,
    pub cone: Vec<bool>,
}

pub fn window_sample(img: &Image, r: &Rational, rho: &Rational, k_max: u32) -> WindowSample {
    let r2 = Fraction::from_rational(&(r * r));
    let rho2 = Fraction::from_rational(&(rho * rho));
    let a = img.f1.abs2();
    let b = img.f2.abs2();
    let cover = cover_indices_abs2(&a, &b, &r2, k_max);
    let cone = cover
        .indices
        .iter()
        .map(|&k| cone_condition_fraction(&img.f1, &img.f2, k, &rho2))
        .collect();
    WindowSample {
        indices: cover.indices,
        in_region: cover.in_region,
        cone,
    }
}

/// `ε^{2n−1}·Π P_j^{n−j}`, the quotient `f_2^n / f_1`.
pub fn window_quotient(fam: &Family) -> Poly {
    let n = fam.n() as usize;
    let factors: Vec<(usize, u32)> = (1..n).map(|j| (j, (n - j) as u32)).collect();
    fam.product(&factors, 0).scale(&fam.params.eps_pow(2 * n as u64 - 1))
}

fn prerequisite<T>(cert: &mut Certificate, what: &str, value: Option<T>) -> Option<T> {
    if value.is_none() {
        cert.absorb(what, &CertifyError::MissingPrerequisite(what.to_string()));
    }
    value
}

/// `|f_1| ≤ 1/n`, `|f_2| ≤ 1/n`, `|f_2| ≤ |f_1|/n` on `1 ≤ |λ| ≤ 2`, from the
/// annulus chains, with exact checks on both boundary circles.
pub fn annulus_in_kn(fam: &Family, chains: Option<&AnnulusChains>) -> Certificate {
    let n = fam.n() as i64;
    let mut cert = Certificate::new(CertificateKind::AnnulusInKn, format!("n={n}"), &fam.hash());
    let Some(ch) = prerequisite(&mut cert, "annulus inequalities", chains) else {
        return cert;
    };
    let bound = Rational::new(BigInt::one(), BigInt::from(n));
    cert.check("sup|f1| < r/n ≤ 1/n", ch.f1_hi < bound, "");
    cert.check("sup|f2| < r²/n ≤ 1/n", ch.f2_hi < bound, "");
    cert.check("sup|f2| < inf|f1|/n", ch.f2_hi < &ch.f1_lo * &bound, "");
    let n2 = Fraction::from_int(BigInt::from(n * n));
    let one = Fraction::one();
    let (n2i, onei) = (Interval::from_fraction(&n2), Interval::from_fraction(&one));
    let mut bad = 0usize;
    for radius in [int(1), int(2)] {
        let circle = CircleSpec::new(radius).expect("positive");
        for mu in circle.sample_points(CIRCLE_POINTS) {
            let a = fam.f1_scaled().eval(&mu).abs2();
            let b = fam.f2_scaled().eval(&mu).abs2();
            let (ai, bi) = (Interval::from_fraction(&a), Interval::from_fraction(&b));
            let ok = decide_le(&ai.mul(&n2i), &onei, || &a * &n2 <= one)
                && decide_le(&bi.mul(&n2i), &onei, || &b * &n2 <= one)
                && decide_le(&bi.mul(&n2i), &ai, || &b * &n2 <= a);
            if !ok {
                bad += 1;
                cert.counterexamples.push(mu.to_complex());
            }
        }
    }
    cert.check(
        format!("K_n inequalities at {} exact circle points", 2 * CIRCLE_POINTS),
        bad == 0,
        format!("{bad} violations"),
    );
    cert
}

/// Number of sampled image points per chart index.
pub fn chart_histogram(windows: &[WindowSample]) -> Vec<(u32, usize)> {
    let mut hist: Vec<(u32, usize)> = Vec::new();
    for w in windows {
        for &k in &w.indices {
            match hist.iter_mut().find(|(j, _)| *j == k) {
                Some((_, c)) => *c += 1,
                None => hist.push((k, 1)),
            }
        }
    }
    hist.sort();
    hist
}

/// Charts `0..n−1` contain the image of `Δ̄₂ ∖ Z`.
///
/// (i) `f_1` divides `f_2^n` with quotient `ε^{2n−1}Π P_j^{n−j}`, whose modulus
/// is below 1 on the annulus by the chains, so below 1 on `Δ̄₂` by maximum
/// modulus; hence `|f_1| > r|f_2|^k` for `k ≥ n`. (ii) Sampled images are
/// covered by a nonempty set of indices, all at most `n − 1`.
pub fn image_chart_window(
    fam: &Family,
    chains: Option<&AnnulusChains>,
    samples: &[Image],
    windows: &[WindowSample],
) -> Certificate {
    let n = fam.n() as usize;
    let mut cert = Certificate::new(CertificateKind::ChartWindow, format!("n={n}"), &fam.hash());
    cert.check(
        "f2^n = f1·ε^(2n-1)·Π P_j^(n-j)",
        fam.f2.pow(n as u32) == &fam.f1 * &window_quotient(fam),
        "",
    );
    let Some(ch) = prerequisite(&mut cert, "annulus inequalities", chains) else {
        return cert;
    };
    cert.check(
        "sup|f2|^n < inf|f1| on the annulus",
        rpow(&ch.f2_hi, n as i64) < ch.f1_lo,
        "",
    );
    let mut empty = 0;
    let mut outside = 0;
    let mut region = 0;
    for (w, img) in windows.iter().zip(samples) {
        if !w.in_region {
            region += 1;
        }
        if w.indices.is_empty() {
            empty += 1;
            cert.counterexamples.push(img.lambda.clone());
        } else if w.indices.iter().any(|&k| k as usize >= n) {
            outside += 1;
            cert.counterexamples.push(img.lambda.clone());
        }
    }
    cert.check(
        format!("{} samples in |f1| < r, |f2| ≤ r²", samples.len()),
        region == 0,
        format!("{region} outside"),
    );
    cert.check("every sample lies in some chart", empty == 0, format!("{empty} uncovered"));
    cert.check(
        format!("no sample in a chart k ≥ {n}"),
        outside == 0,
        format!("{outside} outside the window"),
    );
    cert
}

/// Windows of every sample, computed once and shared by the chart-window and
/// disk-sample certificates.
pub fn sample_windows(fam: &Family, samples: &[Image]) -> Vec<WindowSample> {
    let (r, rho) = (&fam.params.r, &fam.params.rho);
    samples
        .par_iter()
        .map(|img| window_sample(img, r, rho, fam.n() + 2))
        .collect()
}

/// Condition I on samples: each image point lies in a chart `k ≤ n − 1` and
/// satisfies the `ρ`-cone inequality for every chart containing it.
pub fn disk_cone_samples(fam: &Family, samples: &[Image], windows: &[WindowSample]) -> (Certificate, Vec<(u32, usize)>) {
    let n = fam.n();
    let mut cert = Certificate::new(CertificateKind::DiskSamples, format!("n={n}"), &fam.hash());
    let mut no_chart = 0;
    let mut cone_fail = 0;
    for (w, img) in windows.iter().zip(samples) {
        let good: Vec<bool> = w
            .indices
            .iter()
            .zip(&w.cone)
            .filter(|(k, _)| **k < n)
            .map(|(_, c)| *c)
            .collect();
        if good.is_empty() {
            no_chart += 1;
            cert.counterexamples.push(img.lambda.clone());
        } else if good.iter().any(|c| !c) {
            cone_fail += 1;
            cert.counterexamples.push(img.lambda.clone());
        }
    }
    cert.check(
        format!("{} samples of Δ̄₂ ∖ Z in charts 0..{}", samples.len(), n - 1),
        no_chart == 0,
        format!("{no_chart} without a chart"),
    );
    cert.check("ρ-cone inequality in every containing chart", cone_fail == 0, format!("{cone_fail} failures"));
    let hist = chart_histogram(windows);
    let top = hist.last().map(|h| h.0);
    cert.check(
        format!("samples reach chart {}", n - 1),
        top == Some(n - 1),
        format!("histogram {hist:?}"),
    );
    (cert, hist)
}

/// Accepted samples of a region near `center`, located on a decimal scale
/// ladder: the first scale `10^{-m}` (searched by doubling and bisection up to
/// `max_depth`) at which a probe satisfies `inside`, then proposals at that
/// scale and one decade coarser, filtered by `inside`.
fn ladder_samples(
    center: &ComplexRational,
    max_depth: u64,
    want: usize,
    seed: u64,
    stream: u64,
    inside: impl Fn(&ComplexRational) -> bool + Sync,
) -> Vec<ComplexRational> {
    let mut s = Sampler::new(seed, stream);
    let probe = |m: u64, s: &mut Sampler| {
        let z = center + &s.with_modulus(&pow10_inv(m));
        inside(&z)
    };
    let mut hi = 1u64;
    while hi < max_depth && !probe(hi, &mut s) {
        hi = (hi * 2).min(max_depth);
    }
    if !probe(hi, &mut s) {
        return Vec::new();
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if probe(mid, &mut s) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let coarse = hi.saturating_sub(1);
    let attempts = 64 * want;
    let proposals: Vec<ComplexRational> = (0..attempts)
        .map(|i| {
            let m = if i % 4 == 3 { hi + s.below(4) } else { coarse };
            let modulus = pow10_inv(m) * s.unit();
            center + &s.with_modulus(&modulus)
        })
        .collect();
    let mut out = Vec::new();
    for chunk in proposals.chunks(want) {
        let accepted: Vec<ComplexRational> = chunk.par_iter().filter(|z| inside(z)).cloned().collect();
        out.extend(accepted);
        if out.len() >= want {
            break;
        }
    }
    out.truncate(want);
    out
}

/// The cone inequality in squared form:
/// `|f_1|⁴ ≤ (ρ/2)²·|f_2^{k+1} − f_1|²·|f_2|^{2k}`.
fn cone_lemma_holds(img: &Image, k: u32, half_rho2: &Fraction) -> bool {
    let (w1, w2) = (ComplexInterval::from_fraction(&img.f1), ComplexInterval::from_fraction(&img.f2));
    let lhs = w1.abs2().sqr();
    let rhs = Interval::from_fraction(half_rho2)
        .mul(&w2.pow(k + 1).sub(&w1).abs2())
        .mul(&w2.abs2().pow(k));
    decide_le(&lhs, &rhs, || {
        let a = img.f1.abs2();
        let diff = &img.f2.pow(k + 1) - &img.f1;
        &a * &a <= &(half_rho2 * &diff.abs2()) * &img.f2.abs2().pow(k)
    })
}

/// The cone inequality `|f_1|² ≤ (ρ/2)|f_2^{k+1} − f_1|·|f_2|^k` on the closure
/// of `A_k = {λ ∈ Δ₂ : |f_1| < r|f_2|^k}`, `1 ≤ k ≤ n − 1`.
///
/// Stages: the factorization `f_2^{k+1} − f_1 = G·C` (or `f_1·Q_1` for
/// `k = n − 1`); `C = P_{k+1}·Q` exactly, with `C` having exactly `d_{k+1}`
/// roots in `Δ₂` by dominance of its `λ`-part over its `ε`-part on `|λ| = 2`,
/// so `Q` has none and, `C` being nonzero on the circle, is nonvanishing on
/// `Δ̄₂`; the scalar reduction `r² ≤ (ρ/2)(r − r²)` and `|f_2| < r²` on `Δ̄₂`;
/// exact checks at sampled points of `Ā_k`.
pub fn cone_certificate(
    fam: &Family,
    k: usize,
    roots: &[RootResult],
    chains: Option<&AnnulusChains>,
    budget: u64,
    seed: u64,
) -> Certificate {
    let n = fam.n() as usize;
    let mut cert = Certificate::new(CertificateKind::Cone, format!("k={k}"), &fam.hash());
    if k == 0 || k >= n {
        cert.absorb("index", &CertifyError::Inapplicable(format!("k = {k} outside 1..{}", n - 1)));
        return cert;
    }
    let eps = &fam.params.eps;
    let f2k1 = fam.f2.pow(k as u32 + 1);
    let lhs = &f2k1 - &fam.f1;
    let two = int(2);
    if k <= n - 2 {
        let g_factors: Vec<(usize, u32)> = (1..n).map(|j| (j, j.min(k + 1) as u32)).collect();
        let g = fam.product(&g_factors, k + 1).scale(eps);
        let b_factors: Vec<(usize, u32)> = (k + 2..n).map(|j| (j, (j - k - 1) as u32)).collect();
        let b = fam.product(&b_factors, n - k - 1);
        let c = shifted_product(fam, k + 1);
        cert.check("f2^(k+1) − f1 = G·C", &g * &c == lhs, "");
        let (q, rem) = c.divrem(fam.pk(k + 1)).expect("P_{k+1} nonzero");
        cert.check(format!("C = P_{}·Q exactly", k + 1), rem.is_zero(), "");
        let mut hint_factors = Vec::new();
        for j in k + 2..n {
            match roots.get(j - 1) {
                Some(Ok(rc)) => hint_factors.push((fam.pk(j).clone(), (j - k - 1) as u32, CountHint::Known(rc.clone()))),
                _ => {
                    cert.absorb(
                        "prerequisite",
                        &CertifyError::MissingPrerequisite(format!("root localization of P_{j}")),
                    );
                    return cert;
                }
            }
        }
        hint_factors.push((Poly::monomial(Rational::one(), n - k - 1), 1, CountHint::Elementary));
        let hint = CountHint::Split {
            dominant: -&b,
            hint: Box::new(CountHint::Product(hint_factors)),
        };
        let Some(Ok(pk1_cert)) = roots.get(k) else {
            cert.absorb(
                "prerequisite",
                &CertifyError::MissingPrerequisite(format!("root localization of P_{}", k + 1)),
            );
            return cert;
        };
        let counts = count_roots_in_disk(&c, &two, &hint, budget).and_then(|cc| {
            count_roots_in_disk(fam.pk(k + 1), &two, &CountHint::Known(pk1_cert.clone()), budget).map(|pc| (cc, pc))
        });
        match counts {
            Ok((cc, pc)) => {
                cert.subdivisions += cc.subdivisions();
                cert.margin = cc.min_margin();
                cert.check(
                    format!("C has {} roots in |λ| < 2 (dominance on |λ| = 2)", cc.count),
                    cc.count == fam.params.d_k(k + 1),
                    "",
                );
                cert.check(
                    format!("P_{} has all {} roots in |λ| < 2", k + 1, pc.count),
                    pc.is_complete(),
                    "",
                );
                cert.check(
                    "Q has no roots in the closed disk |λ| ≤ 2",
                    cc.count == pc.count && q.degree().is_some(),
                    "",
                );
            }
            Err(e) => {
                cert.absorb("Q nonvanishing", &e);
                return cert;
            }
        }
    } else {
        let factors: Vec<(usize, u32)> = (1..n).map(|j| (j, (n - j) as u32)).collect();
        let head = fam.product(&factors, 0).scale(&fam.params.eps_pow(2 * n as u64 - 1));
        let q1 = &head - &Poly::one();
        cert.check("f2^n − f1 = f1·Q1", &fam.f1 * &q1 == lhs, "");
        let hint = CountHint::Split {
            dominant: Poly::constant(int(-1)),
            hint: Box::new(CountHint::Elementary),
        };
        match count_roots_in_disk(&q1, &two, &hint, budget) {
            Ok(cc) => {
                cert.subdivisions += cc.subdivisions();
                cert.margin = cc.min_margin();
                cert.check("Q1 has no roots in the closed disk |λ| ≤ 2", cc.count == 0, "");
            }
            Err(e) => {
                cert.absorb("Q1 nonvanishing", &e);
                return cert;
            }
        }
    }
    let r = &fam.params.r;
    let rho = &fam.params.rho;
    let r2 = r * r;
    cert.check(
        "r² ≤ (ρ/2)(r − r²)",
        r2 <= rho / &two * (r - &r2),
        format!("{} vs {}", format_rational(&r2), format_rational(&(rho / &two * (r - &r2)))),
    );
    let Some(ch) = prerequisite(&mut cert, "annulus inequalities", chains) else {
        return cert;
    };
    cert.check("|f2| < r² on |λ| ≤ 2 (maximum modulus)", ch.f2_hi < r2, "");

    let r2f = Fraction::from_rational(&r2);
    let r2i = Interval::from_rational(&r2);
    let in_region = |lambda: &ComplexRational| {
        if lambda.abs2() > int(4) {
            return false;
        }
        let img = Image::at(fam, lambda.clone());
        let (w1, w2) = (ComplexInterval::from_fraction(&img.f1), ComplexInterval::from_fraction(&img.f2));
        decide_le(&w1.abs2(), &r2i.mul(&w2.abs2().pow(k as u32)), || {
            img.f1.abs2() <= &r2f * &img.f2.abs2().pow(k as u32)
        })
    };
    let depth = decimal_depth(eps) * (1 + (1..n).map(|j| j as u64 * fam.params.c_k(j)).sum::<u64>()) + 8;
    let mut centers = vec![ComplexRational::zero()];
    if k < n - 1 {
        centers.push(ComplexRational::real(fam.params.eps_pow(fam.params.c_k(n - 1))));
    }
    let per_center = REGION_SAMPLES.div_ceil(centers.len());
    let mut points = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        points.extend(ladder_samples(c, depth, per_center, seed, (k * 16 + i) as u64 + 1_000_000, &in_region));
    }
    let half_rho2 = Fraction::from_rational(&((rho / &two) * (rho / &two)));
    let failures: Vec<ComplexRational> = points
        .par_iter()
        .filter(|z| !cone_lemma_holds(&Image::at(fam, (*z).clone()), k as u32, &half_rho2))
        .cloned()
        .collect();
    cert.check(
        format!("{} exact samples of closure(A_{k})", points.len()),
        points.len() >= REGION_SAMPLES,
        format!("{} requested", REGION_SAMPLES),
    );
    cert.check(
        "cone inequality at every sample",
        failures.is_empty(),
        format!("{} failures", failures.len()),
    );
    cert.counterexamples.extend(failures);
    cert
}

/// The `k = 0` cone inequality `|f_1|² ≤ (ρ/2)|f_2 − f_1|` on `Δ̄₂`.
///
/// `f_2 − f_1 = ε·P_1²·P_2⋯P_{n−1}·λ` divides `f_1²`, so the quotient is a
/// polynomial and it suffices to bound it on `|λ| = 2`, where
/// `|f_1|² + (ρ/2)|f_2| ≤ (ρ/2)|f_1|` follows from the root bounds.
pub fn k0_certificate(
    fam: &Family,
    bounds: Option<&AnnulusBounds>,
    disk: &[Image],
    seed: u64,
) -> Certificate {
    let n = fam.n() as usize;
    let mut cert = Certificate::new(CertificateKind::ConeBase, format!("n={n}"), &fam.hash());
    let eps = &fam.params.eps;
    let diff = &fam.f2 - &fam.f1;
    let factors: Vec<(usize, u32)> = (1..n).map(|j| (j, if j == 1 { 2 } else { 1 })).collect();
    cert.check(
        "f2 − f1 = ε·P_1²·P_2⋯P_(n-1)·λ",
        diff == fam.product(&factors, 1).scale(eps),
        "",
    );
    let q_factors: Vec<(usize, u32)> = (1..n).map(|j| (j, 2 * j as u32 - if j == 1 { 2 } else { 1 })).collect();
    let quotient = fam.product(&q_factors, 2 * n - 1).scale(eps);
    cert.check(
        "f1² = (f2 − f1)·ε·λ^(2n-1)·Π_{j≥2} P_j^(2j-1)",
        &fam.f1 * &fam.f1 == &diff * &quotient,
        "",
    );
    let Some(b) = prerequisite(&mut cert, "annulus bounds", bounds) else {
        return cert;
    };
    let two = int(2);
    let half_rho = &fam.params.rho / &two;
    let lam_n = rpow(&two, n as i64);
    let mut f1_lo = eps * &lam_n;
    let mut f1_hi = eps * &lam_n;
    let mut f2_hi = eps * eps * &two;
    for (i, (lo, hi)) in b.lower.iter().zip(&b.upper).enumerate() {
        let j = i as i64 + 1;
        f1_lo *= rpow(lo, j);
        f1_hi *= rpow(hi, j);
        f2_hi *= hi;
    }
    cert.check(
        "sup|f1|² + (ρ/2)sup|f2| ≤ (ρ/2)inf|f1| on |λ| = 2",
        &f1_hi * &f1_hi + &half_rho * &f2_hi <= &half_rho * &f1_lo,
        "",
    );
    let half_rho2 = Fraction::from_rational(&(&half_rho * &half_rho));
    let mut s = Sampler::new(seed, 2_000_000);
    let mut points: Vec<ComplexRational> = (0..REGION_SAMPLES).map(|_| s.with_modulus(&two)).collect();
    points.extend(disk.iter().map(|img| img.lambda.clone()));
    let failures: Vec<ComplexRational> = points
        .par_iter()
        .filter(|z| !cone_lemma_holds(&Image::at(fam, (*z).clone()), 0, &half_rho2))
        .cloned()
        .collect();
    cert.check(
        format!("{REGION_SAMPLES} boundary and {} interior exact samples", disk.len()),
        failures.is_empty(),
        format!("{} failures", failures.len()),
    );
    cert.counterexamples.extend(failures);
    cert
}

/// Vanishing orders of `f_1`, `f_2` at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    pub f1: u32,
    pub f2: u32,
}

pub fn vanishing_orders(fam: &Family) -> (Certificate, Orders) {
    let n = fam.n();
    let mut cert = Certificate::new(CertificateKind::VanishingOrders, format!("n={n}"), &fam.hash());
    let orders = Orders {
        f1: fam.f1.order_at_zero().unwrap_or(0) as u32,
        f2: fam.f2.order_at_zero().unwrap_or(0) as u32,
    };
    cert.check(
        format!("(ord f1, ord f2) = ({n}, 1)"),
        orders.f1 == n && orders.f2 == 1,
        format!("({}, {})", orders.f1, orders.f2),
    );
    (cert, orders)
}

/// Escape index of `g_n(0)`: a curve germ with orders `(a, 1)` at the origin
/// has its proper transform meet the exceptional curve of index `a − 1`.
pub fn escape_index(orders: Orders) -> Result<u32, CertifyError> {
    if orders.f2 != 1 || orders.f1 < 1 {
        return Err(CertifyError::refuted(format!(
            "orders ({}, {}) are not of the form (a, 1)",
            orders.f1, orders.f2
        )));
    }
    Ok(orders.f1 - 1)
}

/// `(n, escape index)` for each entry, requiring strictly increasing indices.
pub fn escape_witness(entries: &[(u32, Orders)]) -> Result<Vec<(u32, u32)>, CertifyError> {
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(entries.len());
    for &(n, o) in entries {
        let idx = escape_index(o)?;
        if let Some(&(_, prev)) = out.last() {
            if idx <= prev {
                return Err(CertifyError::refuted(format!(
                    "escape index {idx} at n = {n} does not exceed {prev}"
                )));
            }
        }
        out.push((n, idx));
    }
    Ok(out)
}

/// Per-`n` escape certificate. The order pair gives index `n − 1`. In the
/// overlap coordinates of charts `n − 2` and `n − 1` (`z2 = xy`,
/// `z1 = x^n y^{n−1}`) the disk has `y = f_2^n/f_1`, a polynomial with
/// `|y(0)| < r`, and `x = f_1/f_2^{n−1}`, which vanishes at 0; so `g_n(0)` is the
/// point `(0, y(0))` of the exceptional curve. A point far inside the disk
/// around 0 is checked to have `n − 1` as its largest chart index.
pub fn escape_certificate(fam: &Family, orders: Orders) -> (Certificate, Option<u32>) {
    let n = fam.n();
    let mut cert = Certificate::new(CertificateKind::Escape, format!("n={n}"), &fam.hash());
    let idx = match escape_index(orders) {
        Ok(i) => i,
        Err(e) => {
            cert.absorb("orders", &e);
            return (cert, None);
        }
    };
    cert.check(format!("escape index {idx} = n − 1"), idx == n - 1, "");
    let y = window_quotient(fam);
    let y0 = y.coeff(0);
    cert.check(
        "y = f2^n/f1 is a polynomial with 0 < |y(0)| < r",
        fam.f2.pow(n) == &fam.f1 * &y && !y0.is_zero() && y0.abs() < fam.params.r,
        "",
    );
    cert.check(
        "x = f1/f2^(n-1) vanishes at 0",
        orders.f1 > (n - 1) * orders.f2,
        "",
    );
    let depth = sample_depth(fam);
    let lambda = ComplexRational::real(pow10_inv(depth));
    let w = window_sample(&Image::at(fam, lambda), &fam.params.r, &fam.params.rho, n + 2);
    cert.check(
        format!("largest chart index of g_n(10^-{depth}) is {idx}"),
        w.indices.last() == Some(&idx),
        format!("{:?}", w.indices),
    );
    let ok = cert.is_certified();
    (cert, ok.then_some(idx))
}

/// Squared boundary metric `sup max(|f_1|², |f_2|², |f_2/f_1|²)` over
/// `|λ| = 1` samples, with a dyadic upper bound for the unsquared value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupMetric {
    pub n: u32,
    pub samples: usize,
    #[serde(with = "rational_text")]
    pub squared: Rational,
    #[serde(with = "rational_text")]
    pub upper: Rational,
    #[serde(with = "rational_text")]
    pub bound: Rational,
}

impl SupMetric {
    pub fn within_bound(&self) -> bool {
        self.squared <= &self.bound * &self.bound
    }
}

pub fn sup_metric(fam: &Family, samples: usize) -> SupMetric {
    let circle = CircleSpec::new(int(1)).expect("positive");
    let values: Vec<Fraction> = circle
        .sample_points(samples)
        .par_iter()
        .map(|mu| {
            let a = fam.f1_scaled().eval(mu).abs2();
            let b = fam.f2_scaled().eval(mu).abs2();
            let ratio = if a.is_zero() {
                // Unbounded ratio; flagged by the bound check.
                Fraction::from_int(BigInt::from(u64::MAX))
            } else {
                Fraction::new(b.numer() * a.denom(), b.denom() * a.numer())
            };
            a.max(b).max(ratio)
        })
        .collect();
    let best = values.into_iter().max().unwrap_or_else(Fraction::zero);
    let n = fam.n();
    SupMetric {
        n,
        samples,
        upper: best.sqrt_bounds().1,
        squared: best.to_rational(),
        bound: Rational::new(BigInt::one(), BigInt::from(n)),
    }
}

/// Boundary metrics for a sequence of families: each at most `1/n` and
/// nonincreasing along the sequence.
pub fn uniform_convergence_witness(fams: &[&Family], samples: usize) -> (Vec<SupMetric>, Result<(), CertifyError>) {
    let metrics: Vec<SupMetric> = fams.iter().map(|f| sup_metric(f, samples)).collect();
    for m in &metrics {
        if !m.within_bound() {
            return (
                metrics.clone(),
                Err(CertifyError::refuted(format!("boundary metric exceeds 1/{} at n = {}", m.n, m.n))),
            );
        }
    }
    for w in metrics.windows(2) {
        if w[1].squared > w[0].squared {
            return (
                metrics.clone(),
                Err(CertifyError::refuted(format!(
                    "boundary metric increases from n = {} to n = {}",
                    w[0].n, w[1].n
                ))),
            );
        }
    }
    (metrics, Ok(()))
}

pub fn sup_metric_certificate(fam: &Family, metric: &SupMetric) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::BoundaryConvergence, format!("n={}", fam.n()), &fam.hash());
    cert.check(
        format!("sup over {} points of |λ| = 1 is ≤ 1/{}", metric.samples, metric.n),
        metric.within_bound(),
        format!("≤ {}", format_rational(&metric.upper)),
    );
    cert
}

/// Conditions I–IV for one `n`, referring to certificates by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub n: u32,
    pub condition_i: Verdict,
    pub condition_ii: Verdict,
    pub condition_iii: SupMetric,
    pub condition_iv: Option<u32>,
    pub orders: Orders,
    pub chart_histogram: Vec<(u32, usize)>,
    pub disk_samples: usize,
    pub seed: u64,
}

/// Combined verdict: refuted if any is refuted, else undecided if any is
/// undecided.
pub fn combine<'a>(certs: impl IntoIterator<Item = &'a Certificate>) -> Verdict {
    let mut out = Verdict::Certified;
    for c in certs {
        match &c.verdict {
            Verdict::Certified => {}
            Verdict::Refuted { reason } => {
                return Verdict::Refuted {
                    reason: format!("{}: {reason}", c.label),
                }
            }
            Verdict::Undecided { reason } => {
                if out.is_certified() {
                    out = Verdict::Undecided {
                        reason: format!("{}: {reason}", c.label),
                    };
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::circle::DEFAULT_BUDGET;
    use crate::family::{build_family, FamilyParams};
    use crate::lemmas::{annulus_bounds_certificate, corollary_ineq_certificate, root_localization};

    fn family(n: u32) -> Family {
        build_family(FamilyParams::derive(n, rat(1, 5), rat(1, 2), None).unwrap()).unwrap()
    }

    #[test]
    fn orders_and_escape() {
        let mut entries = Vec::new();
        for n in 2..=4 {
            let fam = family(n);
            let (cert, o) = vanishing_orders(&fam);
            assert!(cert.is_certified());
            assert_eq!(o, Orders { f1: n, f2: 1 });
            entries.push((n, o));
        }
        assert_eq!(escape_witness(&entries).unwrap(), vec![(2, 1), (3, 2), (4, 3)]);
        entries.swap(0, 1);
        assert!(escape_witness(&entries).is_err());
    }

    #[test]
    fn n2_pipeline_pieces() {
        let fam = family(2);
        let roots = root_localization(&fam, DEFAULT_BUDGET);
        let (_, bounds) = annulus_bounds_certificate(&fam, &roots, 32);
        let (_, chains) = corollary_ineq_certificate(&fam, bounds.as_ref(), 32);
        assert!(annulus_in_kn(&fam, chains.as_ref()).is_certified());
        let disk = disk_samples(&fam, 200, 7);
        let windows = sample_windows(&fam, &disk);
        let w = image_chart_window(&fam, chains.as_ref(), &disk, &windows);
        assert!(w.is_certified(), "{w:?}");
        let (c, hist) = disk_cone_samples(&fam, &disk, &windows);
        assert!(c.is_certified(), "{c:?}");
        assert!(hist.iter().any(|h| h.0 == 1));
        let cone = cone_certificate(&fam, 1, &roots, chains.as_ref(), DEFAULT_BUDGET, 7);
        assert!(cone.is_certified(), "{cone:?}");
        let k0 = k0_certificate(&fam, bounds.as_ref(), &disk[..20], 7);
        assert!(k0.is_certified(), "{k0:?}");
        let (esc, idx) = escape_certificate(&fam, vanishing_orders(&fam).1);
        assert!(esc.is_certified(), "{esc:?}");
        assert_eq!(idx, Some(1));
    }

    #[test]
    fn chart_window_quotient_n2() {
        let fam = family(2);
        let (q, rem) = fam.f2.pow(2).divrem(&fam.f1).unwrap();
        assert!(rem.is_zero());
        let e = &fam.params.eps;
        // ε³(ε − λ)
        assert_eq!(q, Poly::new(vec![e.pow(4), -e.pow(3)]));
    }

    #[test]
    fn sup_metric_below_bound() {
        let a = family(2);
        let b = family(3);
        let (m, ok) = uniform_convergence_witness(&[&a, &b], 64);
        assert!(ok.is_ok());
        assert!(m.iter().all(|x| x.squared >= Rational::zero()));
    }
}
