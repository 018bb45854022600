//! Certified modulus bounds on circles `|λ| = R`.
//!
//! Circle points come from the half-angle map
//! `t ↦ ±R·((1 − t²) + 2it)/(1 + t²)` with dyadic `t ∈ [−1, 1]`, so every
//! sample lies exactly on the circle; the `+` chart covers `Re λ ≥ 0` and the
//! `−` chart covers `Re λ ≤ 0`. Between samples a Lipschitz bound
//! `|p(λ) − p(μ)| ≤ M·|λ − μ|` with `M = Σ i·|a_i|·R^{i−1}` controls the
//! polynomial; an arc `[t0, t1]` lies within `R·(t1 − t0)` of the image of its
//! midpoint because `arctan` is 1-Lipschitz.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::{int, rational_text, ComplexFraction, Rational};
use crate::certificate::{sha256_hex, Certificate, CertificateKind, CertifyError};
use crate::poly::{Poly, ScaledPoly};

/// Default number of arc evaluations per circle.
pub const DEFAULT_BUDGET: u64 = 1 << 16;

/// Arcs per chart before any refinement.
const INITIAL_ARCS_PER_CHART: i64 = 4;

/// Min-modulus refinement stops once `M·δ ≤ |p(μ)|/STOP_RATIO` on the worst arc.
const STOP_RATIO: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleSpec {
    #[serde(with = "rational_text")]
    radius: Rational,
}

impl CircleSpec {
    pub fn new(radius: Rational) -> Result<Self, CertifyError> {
        if !radius.is_positive() {
            return Err(CertifyError::Inapplicable(
                "circle radius must be positive".into(),
            ));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    /// The point with half-angle parameter `t` on the chart `sign ∈ {+1, −1}`.
    pub fn point(&self, t: &Rational, positive_chart: bool) -> ComplexFraction {
        let a = t.numer();
        let b = t.denom();
        let a2 = a * a;
        let b2 = b * b;
        let rn = self.radius.numer();
        let rd = self.radius.denom();
        let mut re = rn * (&b2 - &a2);
        let mut im = rn * (BigInt::from(2) * a * b);
        if !positive_chart {
            re = -re;
            im = -im;
        }
        ComplexFraction::new(re, im, rd * (a2 + b2))
    }

    /// `count` exact points spread over both charts (`count` even, ≥ 2).
    pub fn sample_points(&self, count: usize) -> Vec<ComplexFraction> {
        let per_chart = (count / 2).max(1) as i64;
        let mut out = Vec::with_capacity(count);
        for chart in [true, false] {
            for i in 0..per_chart {
                let t = Rational::new(BigInt::from(2 * i - per_chart), BigInt::from(per_chart));
                out.push(self.point(&t, chart));
            }
        }
        out
    }

    fn initial_arcs(&self) -> Vec<Arc> {
        let mut arcs = Vec::new();
        for chart in [true, false] {
            for j in 0..INITIAL_ARCS_PER_CHART {
                let w = INITIAL_ARCS_PER_CHART;
                arcs.push(Arc {
                    positive_chart: chart,
                    t0: Rational::new(BigInt::from(2 * j - w), BigInt::from(w)),
                    t1: Rational::new(BigInt::from(2 * j + 2 - w), BigInt::from(w)),
                });
            }
        }
        arcs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Arc {
    positive_chart: bool,
    t0: Rational,
    t1: Rational,
}

impl Arc {
    fn mid(&self) -> Rational {
        (&self.t0 + &self.t1) / int(2)
    }

    /// Bound on `|λ − μ|` for λ on the arc and μ its midpoint image.
    fn reach(&self, radius: &Rational) -> Rational {
        radius * (&self.t1 - &self.t0)
    }

    fn split(&self) -> (Arc, Arc) {
        let m = self.mid();
        (
            Arc {
                positive_chart: self.positive_chart,
                t0: self.t0.clone(),
                t1: m.clone(),
            },
            Arc {
                positive_chart: self.positive_chart,
                t0: m,
                t1: self.t1.clone(),
            },
        )
    }
}

/// Certified `|p(λ)|² ≥ lower` for every λ on the circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinModulus {
    pub lower: Rational,
    pub arcs: u64,
}

struct ArcBound {
    lo: Rational,
    sqrt_lo: Rational,
    slack: Rational,
}

fn lower_on_arc(p: &ScaledPoly, lip: &Rational, circle: &CircleSpec, arc: &Arc) -> ArcBound {
    let mu = circle.point(&arc.mid(), arc.positive_chart);
    let (sqrt_lo, _) = p.eval(&mu).abs2().sqrt_bounds();
    let slack = lip * arc.reach(circle.radius());
    let lo = &sqrt_lo - &slack;
    ArcBound { lo, sqrt_lo, slack }
}

/// Certified lower bound on `|p|²` over the whole circle.
///
/// Refines the arc with the weakest bound first until either the weakest arc
/// is accurate to within `1/64` of its sampled modulus or `budget` arc
/// evaluations are spent. A bound that is not strictly positive is reported as
/// [`CertifyError::BudgetExhausted`]; no returned value is ever unsound.
pub fn circle_min_modulus_lower_bound(
    p: &Poly,
    circle: &CircleSpec,
    budget: u64,
) -> Result<MinModulus, CertifyError> {
    if p.is_zero() {
        return Err(CertifyError::Inapplicable("zero polynomial".into()));
    }
    if p.degree() == Some(0) {
        return Ok(MinModulus {
            lower: p.coeff(0) * p.coeff(0),
            arcs: 0,
        });
    }
    let scaled = p.scaled();
    let lip = p.lipschitz_bound(circle.radius());
    let mut evaluated = 0u64;
    let mut heap = BinaryHeap::new();
    for (seq, arc) in circle.initial_arcs().into_iter().enumerate() {
        if evaluated >= budget {
            return Err(CertifyError::BudgetExhausted { budget });
        }
        evaluated += 1;
        let b = lower_on_arc(&scaled, &lip, circle, &arc);
        heap.push(Reverse(HeapArc {
            lo: b.lo,
            seq: seq as u64,
            accurate: b.slack * int(STOP_RATIO) <= b.sqrt_lo,
            arc,
        }));
    }
    let mut seq = heap.len() as u64;
    loop {
        let Reverse(worst) = heap.pop().expect("arcs present");
        if worst.accurate || evaluated + 2 > budget {
            return if worst.lo.is_positive() {
                Ok(MinModulus {
                    lower: &worst.lo * &worst.lo,
                    arcs: evaluated,
                })
            } else {
                Err(CertifyError::BudgetExhausted { budget })
            };
        }
        let (left, right) = worst.arc.split();
        for arc in [left, right] {
            evaluated += 1;
            let b = lower_on_arc(&scaled, &lip, circle, &arc);
            heap.push(Reverse(HeapArc {
                lo: b.lo,
                seq,
                accurate: b.slack * int(STOP_RATIO) <= b.sqrt_lo,
                arc,
            }));
            seq += 1;
        }
    }
}

#[derive(Debug)]
struct HeapArc {
    lo: Rational,
    seq: u64,
    accurate: bool,
    arc: Arc,
}

impl PartialEq for HeapArc {
    fn eq(&self, o: &Self) -> bool {
        self.lo == o.lo && self.seq == o.seq
    }
}
impl Eq for HeapArc {}
impl PartialOrd for HeapArc {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapArc {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.lo.cmp(&o.lo).then(self.seq.cmp(&o.seq))
    }
}

/// Certificate that `|dominated(λ)| < |dominant(λ)|` on the whole circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceCertificate {
    pub dominant: Poly,
    pub dominated: Poly,
    pub circle: CircleSpec,
    pub subdivision_count: u64,
    /// Minimum over arcs of `(certified min |dominant|)² − (certified max |dominated|)²`.
    pub margin: Rational,
}

impl DominanceCertificate {
    pub fn to_record(&self, label: &str, family: &str) -> Certificate {
        let mut c = Certificate::new(CertificateKind::Dominance, label, family);
        c.subdivisions = self.subdivision_count;
        c.margin = Some(self.margin.clone());
        c.check(
            "dominant polynomial",
            true,
            sha256_hex(serde_json::to_string(&self.dominant).unwrap_or_default().as_bytes()),
        );
        c.check(
            "dominated polynomial",
            true,
            sha256_hex(serde_json::to_string(&self.dominated).unwrap_or_default().as_bytes()),
        );
        c.check(
            format!("margin > 0 on |λ| = {}", crate::arith::format_rational(self.circle.radius())),
            self.margin.is_positive(),
            "",
        );
        c
    }
}

/// Certifies `|dominated| < |dominant|` on the circle arc by arc.
///
/// Returns [`CertifyError::Refuted`] with the offending point when some exact
/// circle sample has `|dominated| ≥ |dominant|`, and
/// [`CertifyError::BudgetExhausted`] when `budget` arc evaluations do not
/// suffice.
pub fn certify_dominance(
    dominant: &Poly,
    dominated: &Poly,
    circle: &CircleSpec,
    budget: u64,
) -> Result<DominanceCertificate, CertifyError> {
    if dominant.is_zero() {
        return Err(CertifyError::Inapplicable("zero dominant polynomial".into()));
    }
    let dom = dominant.scaled();
    let sub = dominated.scaled();
    let dom_lip = dominant.lipschitz_bound(circle.radius());
    let sub_lip = dominated.lipschitz_bound(circle.radius());
    let mut queue: VecDeque<Arc> = circle.initial_arcs().into();
    let mut evaluated = 0u64;
    let mut margin: Option<Rational> = None;
    while let Some(arc) = queue.pop_front() {
        if evaluated >= budget {
            return Err(CertifyError::BudgetExhausted { budget });
        }
        evaluated += 1;
        let mu = circle.point(&arc.mid(), arc.positive_chart);
        let a = dom.eval(&mu).abs2();
        let b = sub.eval(&mu).abs2();
        if b >= a {
            return Err(CertifyError::Refuted {
                reason: "dominated modulus reaches the dominant one on the circle".into(),
                point: Some(mu.to_complex()),
            });
        }
        let reach = arc.reach(circle.radius());
        let (a_lo, _) = a.sqrt_bounds();
        let (_, b_hi) = b.sqrt_bounds();
        let lo = a_lo - &dom_lip * &reach;
        let hi = b_hi + &sub_lip * &reach;
        if lo.is_positive() && lo > hi {
            let m = &lo * &lo - &hi * &hi;
            margin = Some(match margin {
                Some(old) if old < m => old,
                _ => m,
            });
        } else {
            let (l, r) = arc.split();
            queue.push_back(l);
            queue.push_back(r);
        }
    }
    Ok(DominanceCertificate {
        dominant: dominant.clone(),
        dominated: dominated.clone(),
        circle: circle.clone(),
        subdivision_count: evaluated,
        margin: margin.unwrap_or_else(Rational::one),
    })
}

/// Exact check `|p(μ)|² ≥ lower` at `μ`; used by soundness tests.
pub fn holds_at(p: &ScaledPoly, mu: &ComplexFraction, lower: &Rational) -> bool {
    p.eval(mu).abs2().to_rational() >= *lower
}

/// Exact point on the circle with `t = num/den` in the given chart. Mostly
/// useful for tests and reports.
pub fn exact_circle_point(radius: &Rational, num: i64, den: i64, positive_chart: bool) -> ComplexFraction {
    CircleSpec {
        radius: radius.clone(),
    }
    .point(&Rational::new(BigInt::from(num), BigInt::from(den)), positive_chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn circle(r: Rational) -> CircleSpec {
        CircleSpec::new(r).unwrap()
    }

    #[test]
    fn samples_lie_on_the_circle() {
        let c = circle(rat(3, 2));
        for p in c.sample_points(64) {
            assert_eq!(p.abs2().to_rational(), rat(9, 4));
        }
    }

    #[test]
    fn constant_modulus() {
        let m = circle_min_modulus_lower_bound(&Poly::from_ints(&[5]), &circle(int(3)), 16)
            .unwrap();
        assert_eq!(m.lower, int(25));
    }

    #[test]
    fn identity_bound_is_sound_and_useful() {
        let m = circle_min_modulus_lower_bound(&Poly::x(), &circle(int(1)), 64).unwrap();
        assert!(m.lower >= rat(1, 4));
        assert!(m.lower <= int(1));
    }

    #[test]
    fn bound_improves_with_budget() {
        let p = Poly::from_ints(&[-2, 1]);
        let c = circle(int(1));
        let small = circle_min_modulus_lower_bound(&p, &c, 8).unwrap().lower;
        let large = circle_min_modulus_lower_bound(&p, &c, 1 << 12).unwrap().lower;
        assert!(small <= large);
        assert!(large <= int(1));
        assert!(large >= rat(9, 10));
    }

    #[test]
    fn root_on_circle_exhausts() {
        let p = Poly::from_ints(&[-1, 1]);
        let err = circle_min_modulus_lower_bound(&p, &circle(int(1)), 256).unwrap_err();
        assert_eq!(err, CertifyError::BudgetExhausted { budget: 256 });
    }

    #[test]
    fn dominance_examples() {
        let eps = rat(1, 5);
        let cert = certify_dominance(
            &Poly::monomial(int(1), 2),
            &Poly::constant(eps),
            &circle(rat(1, 2)),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(cert.margin.is_positive());
        let err = certify_dominance(&Poly::one(), &Poly::x(), &circle(int(2)), DEFAULT_BUDGET)
            .unwrap_err();
        assert!(matches!(err, CertifyError::Refuted { point: Some(_), .. }));
    }

    #[test]
    fn tight_dominance_exhausts_small_budget() {
        // |2λ² − λ| = |2λ − 1| ≥ 1 on |λ| = 1, only just above 99/100.
        let dominant = Poly::from_ints(&[0, -1, 2]);
        let dominated = Poly::constant(rat(99, 100));
        let err = certify_dominance(&dominant, &dominated, &circle(int(1)), 8).unwrap_err();
        assert_eq!(err, CertifyError::BudgetExhausted { budget: 8 });
    }
}
