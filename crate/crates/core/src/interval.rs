//! Outward-rounded dyadic intervals.
//!
//! Exact values at deep sample points have numerators and denominators of
//! 10⁵ bits and more, and comparing powers and products of them exactly is
//! slow. Enclosing each value in an interval with short dyadic endpoints
//! settles almost every comparison cheaply; callers fall back to exact
//! arithmetic when an interval comparison is inconclusive, so decisions
//! stay exact.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::{ComplexFraction, Fraction, Rational};

/// Mantissa bits kept after each rounded operation.
pub const PREC: u64 = 160;

/// `m · 2^e`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { m: BigInt::zero(), e: 0 }
    }

    pub fn new(m: BigInt, e: i64) -> Self {
        Self { m, e }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn sign(&self) -> Sign {
        self.m.sign()
    }

    /// Exponent of the leading bit plus one: `|self| ∈ [2^{top−1}, 2^top)`.
    fn top(&self) -> i64 {
        self.e + self.m.bits() as i64
    }

    fn round(m: BigInt, e: i64, up: bool) -> Self {
        let bits = m.bits();
        if bits <= PREC {
            return Self { m, e };
        }
        let s = bits - PREC;
        // `>>` on BigInt rounds toward −∞.
        let q = if up { -((-&m) >> s) } else { &m >> s };
        Self { m: q, e: e + s as i64 }
    }

    pub fn mul(&self, o: &Self, up: bool) -> Self {
        Self::round(&self.m * &o.m, self.e + o.e, up)
    }

    pub fn neg(&self) -> Self {
        Self {
            m: -&self.m,
            e: self.e,
        }
    }

    pub fn add(&self, o: &Self, up: bool) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (big, small) = if self.top() >= o.top() { (self, o) } else { (o, self) };
        // A summand far below the other's precision only nudges the result by
        // one unit in the direction of rounding.
        let floor = big.top() - PREC as i64 - 4;
        if small.top() < floor {
            let pushes = match small.sign() {
                Sign::Plus => up,
                _ => !up,
            };
            if !pushes {
                return big.clone();
            }
            let unit = Self {
                m: if up { BigInt::from(1) } else { BigInt::from(-1) },
                e: floor,
            };
            return big.add(&unit, up);
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as usize;
        let b = &o.m << (o.e - e) as usize;
        Self::round(a + b, e, up)
    }

    pub fn to_rational(&self) -> Rational {
        if self.e >= 0 {
            Rational::from_integer(&self.m << self.e as usize)
        } else {
            Rational::new(self.m.clone(), BigInt::from(1) << (-self.e) as usize)
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.sign(), o.sign());
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = if self.top() != o.top() {
            self.top().cmp(&o.top())
        } else {
            let e = self.e.min(o.e);
            let a = self.m.abs() << (self.e - e) as usize;
            let b = o.m.abs() << (o.e - e) as usize;
            a.cmp(&b)
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn point(d: Dyadic) -> Self {
        Self { lo: d.clone(), hi: d }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::new(BigInt::from(1), 0))
    }

    /// Enclosure of `num/den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        if num.is_zero() {
            return Self::zero();
        }
        let s = PREC as i64 + den.bits() as i64 - num.bits() as i64 + 1;
        let (n, d) = if s >= 0 {
            (num << s as usize, den)
        } else {
            (num, den << (-s) as usize)
        };
        let (q, r) = n.div_mod_floor(&d);
        let hi = if r.is_zero() { q.clone() } else { &q + 1 };
        Self {
            lo: Dyadic::new(q, -s),
            hi: Dyadic::new(hi, -s),
        }
    }

    pub fn from_fraction(f: &Fraction) -> Self {
        Self::from_ratio(f.numer(), f.denom())
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_ratio(q.numer(), q.denom())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            lo: self.lo.add(&o.lo, false),
            hi: self.hi.add(&o.hi, true),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs.iter().map(|(a, b)| a.mul(b, false)).min().expect("four products");
        let hi = pairs.iter().map(|(a, b)| a.mul(b, true)).max().expect("four products");
        Self { lo, hi }
    }

    pub fn sqr(&self) -> Self {
        let zero = Dyadic::zero();
        if self.lo >= zero {
            Self {
                lo: self.lo.mul(&self.lo, false),
                hi: self.hi.mul(&self.hi, true),
            }
        } else if self.hi <= zero {
            Self {
                lo: self.hi.mul(&self.hi, false),
                hi: self.lo.mul(&self.lo, true),
            }
        } else {
            let a = self.lo.mul(&self.lo, true);
            let b = self.hi.mul(&self.hi, true);
            Self { lo: zero, hi: a.max(b) }
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        result
    }

    /// `Some(true)` if every element of `self` is below every element of
    /// `o`, `Some(false)` if none is, `None` if undecided.
    pub fn lt(&self, o: &Self) -> Option<bool> {
        if self.hi < o.lo {
            Some(true)
        } else if self.lo >= o.hi {
            Some(false)
        } else {
            None
        }
    }

    /// As [`Interval::lt`] for `≤`.
    pub fn le(&self, o: &Self) -> Option<bool> {
        if self.hi <= o.lo {
            Some(true)
        } else if self.lo > o.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }
}

/// Rectangular enclosure of a complex value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn from_fraction(z: &ComplexFraction) -> Self {
        Self {
            re: Interval::from_ratio(&z.re, &z.den),
            im: Interval::from_ratio(&z.im, &z.den),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self {
            re: Interval::one(),
            im: Interval::zero(),
        };
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn abs2(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }
}

/// Decides `lhs < rhs` by intervals, falling back to `exact`.
pub fn decide_lt(lhs: &Interval, rhs: &Interval, exact: impl FnOnce() -> bool) -> bool {
    lhs.lt(rhs).unwrap_or_else(exact)
}

/// Decides `lhs ≤ rhs` by intervals, falling back to `exact`.
pub fn decide_le(lhs: &Interval, rhs: &Interval, exact: impl FnOnce() -> bool) -> bool {
    lhs.le(rhs).unwrap_or_else(exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn encloses_thirds() {
        let i = Interval::from_rational(&rat(1, 3));
        assert!(i.contains(&rat(1, 3)));
        assert!(i.lo < i.hi);
        let n = Interval::from_rational(&rat(-7, 3));
        assert!(n.contains(&rat(-7, 3)));
    }

    #[test]
    fn products_and_sums_enclose() {
        let a = rat(-5, 7);
        let b = rat(11, 13);
        let (ia, ib) = (Interval::from_rational(&a), Interval::from_rational(&b));
        assert!(ia.mul(&ib).contains(&(&a * &b)));
        assert!(ia.add(&ib).contains(&(&a + &b)));
        assert!(ia.sub(&ib).contains(&(&a - &b)));
        assert!(ia.sqr().contains(&(&a * &a)));
        assert!(ib.pow(9).contains(&b.pow(9)));
    }

    #[test]
    fn tiny_summand_is_absorbed_soundly() {
        let big = Interval::from_rational(&int(1));
        let tiny_q = Rational::new(BigInt::from(1), BigInt::from(1) << 4000usize);
        let tiny = Interval::from_rational(&tiny_q);
        let s = big.add(&tiny);
        assert!(s.contains(&(int(1) + &tiny_q)));
        let d = big.sub(&tiny);
        assert!(d.contains(&(int(1) - &tiny_q)));
    }

    #[test]
    fn comparisons() {
        let a = Interval::from_rational(&rat(1, 3));
        let b = Interval::from_rational(&rat(1, 2));
        assert_eq!(a.lt(&b), Some(true));
        assert_eq!(b.lt(&a), Some(false));
        assert_eq!(a.lt(&a), None);
        assert!(decide_le(&a, &a, || true));
    }
}
