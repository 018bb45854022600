//! Exact scalar arithmetic.
//!
//! [`Rational`] and [`ComplexRational`] are the canonical, always-reduced
//! types used at API boundaries and in reports. [`Fraction`] and
//! [`ComplexFraction`] are unreduced counterparts for the hot evaluation
//! paths: they never run a gcd, and comparisons cross-multiply. Both families
//! are exact; they differ only in when normalization happens.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Operand size from which gcds go through malachite. num-bigint's binary gcd
/// is quadratic in the bit length and dominates polynomial products once
/// coefficients reach 10⁵ bits.
const FAST_GCD_BITS: u64 = 2048;

/// Nonnegative gcd of two integers.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    use malachite_base::num::arithmetic::traits::Gcd;
    use malachite_nz::natural::Natural;
    if a.bits().max(b.bits()) < FAST_GCD_BITS {
        return a.gcd(b);
    }
    let to_natural = |x: &BigInt| Natural::from_limbs_asc(&x.magnitude().to_u64_digits());
    let g = to_natural(a).gcd(to_natural(b));
    let digits: Vec<u32> = g
        .to_limbs_asc()
        .iter()
        .flat_map(|&l| [l as u32, (l >> 32) as u32])
        .collect();
    BigInt::from_biguint(Sign::Plus, num_bigint::BigUint::new(digits))
}

/// Nonnegative lcm of two integers.
pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a / gcd(a, b) * b).abs()
}

/// `num/den` in lowest terms, using [`gcd`].
pub fn reduced(num: BigInt, den: BigInt) -> Rational {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return Rational::zero();
    }
    let g = gcd(&num, &den);
    let (n, d) = (num / &g, den / &g);
    if d.is_negative() {
        Rational::new_raw(-n, -d)
    } else {
        Rational::new_raw(n, d)
    }
}

/// `a + b` normalized with [`gcd`].
pub fn qadd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.denom() == b.denom() {
        return reduced(a.numer() + b.numer(), a.denom().clone());
    }
    reduced(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom())
}

/// `a − b` normalized with [`gcd`].
pub fn qsub(a: &Rational, b: &Rational) -> Rational {
    qadd(a, &-b)
}

/// `a·b` normalized with [`gcd`].
pub fn qmul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    reduced(a.numer() * b.numer(), a.denom() * b.denom())
}

/// Bits of relative precision carried by [`Fraction::sqrt_bounds`].
const SQRT_BITS: u64 = 96;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("`{0}` is not of the form num/den (decimals are not accepted)")]
    Malformed(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

/// Parses `"num/den"` or a bare integer `"num"`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| malformed())?;
    let den: BigInt = den.parse().map_err(|_| malformed())?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Always renders `num/den`, including integers (`"3/1"`).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `base^exp` for a signed exponent.
pub fn rpow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Serde adapter writing a [`Rational`] as a `"num/den"` string.
pub mod rational_text {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod opt_rational_text {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `re² + im²`.
    pub fn abs2(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

/// Free-function form of [`ComplexRational::abs2`].
pub fn abs2(z: &ComplexRational) -> Rational {
    z.abs2()
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}i",
            format_rational(&self.re),
            format_rational(&self.im)
        )
    }
}

impl Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational::new(-self.re.clone(), -self.im.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexText {
    re: String,
    im: String,
}

impl Serialize for ComplexRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ComplexText {
            re: format_rational(&self.re),
            im: format_rational(&self.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = ComplexText::deserialize(d)?;
        Ok(Self::new(
            parse_rational(&t.re).map_err(serde::de::Error::custom)?,
            parse_rational(&t.im).map_err(serde::de::Error::custom)?,
        ))
    }
}

/// Exact fraction `num/den` (den > 0) that is never reduced.
#[derive(Clone, Debug)]
pub struct Fraction {
    num: BigInt,
    den: BigInt,
}

impl Fraction {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            Self {
                num: -num,
                den: -den,
            }
        } else {
            Self { num, den }
        }
    }

    pub fn zero() -> Self {
        Self::from_int(BigInt::zero())
    }

    pub fn one() -> Self {
        Self::from_int(BigInt::one())
    }

    pub fn from_int(num: BigInt) -> Self {
        Self {
            num,
            den: BigInt::one(),
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self {
            num: q.numer().clone(),
            den: q.denom().clone(),
        }
    }

    pub fn to_rational(&self) -> Rational {
        reduced(self.num.clone(), self.den.clone())
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self {
            num: num_traits::pow(self.num.clone(), exp as usize),
            den: num_traits::pow(self.den.clone(), exp as usize),
        }
    }

    /// Rational bounds `lo ≤ √self ≤ hi` with ~96 bits of relative accuracy.
    /// Both bounds are dyadic, so they stay small regardless of the size of
    /// `self`. Panics on negative input.
    pub fn sqrt_bounds(&self) -> (Rational, Rational) {
        assert!(!self.num.is_negative(), "square root of a negative value");
        if self.num.is_zero() {
            return (Rational::zero(), Rational::zero());
        }
        let num_bits = self.num.bits() as i64;
        let den_bits = self.den.bits() as i64;
        // Choose e so that num·4^e/den carries about 2·SQRT_BITS bits.
        let e = (2 * SQRT_BITS as i64 - (num_bits - den_bits) + 1).div_euclid(2);
        let (x_floor, x_ceil) = if e >= 0 {
            let scaled = &self.num << (2 * e as usize);
            let (q, r) = scaled.div_rem(&self.den);
            let c = if r.is_zero() { q.clone() } else { &q + 1 };
            (q, c)
        } else {
            let div = &self.den << (2 * (-e) as usize);
            let (q, r) = self.num.div_rem(&div);
            let c = if r.is_zero() { q.clone() } else { &q + 1 };
            (q, c)
        };
        let lo = x_floor.sqrt();
        let mut hi = x_ceil.sqrt();
        if &hi * &hi < x_ceil {
            hi += 1;
        }
        let unscale = |s: BigInt| -> Rational {
            if e >= 0 {
                Rational::new(s, BigInt::one() << e as usize)
            } else {
                Rational::from_integer(s << (-e) as usize)
            }
        };
        (unscale(lo), unscale(hi))
    }
}

impl PartialEq for Fraction {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Fraction {}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Fraction {
    fn cmp(&self, o: &Self) -> Ordering {
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }
}

impl Add for &Fraction {
    type Output = Fraction;
    fn add(self, o: &Fraction) -> Fraction {
        if self.den == o.den {
            return Fraction {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        Fraction {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }
}

impl Sub for &Fraction {
    type Output = Fraction;
    fn sub(self, o: &Fraction) -> Fraction {
        if self.den == o.den {
            return Fraction {
                num: &self.num - &o.num,
                den: self.den.clone(),
            };
        }
        Fraction {
            num: &self.num * &o.den - &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }
}

impl Mul for &Fraction {
    type Output = Fraction;
    fn mul(self, o: &Fraction) -> Fraction {
        Fraction {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }
}

/// Unreduced Gaussian fraction `(re + i·im)/den`, den > 0.
#[derive(Clone, Debug)]
pub struct ComplexFraction {
    pub re: BigInt,
    pub im: BigInt,
    pub den: BigInt,
}

impl ComplexFraction {
    pub fn new(re: BigInt, im: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if den.sign() == Sign::Minus {
            Self {
                re: -re,
                im: -im,
                den: -den,
            }
        } else {
            Self { re, im, den }
        }
    }

    pub fn from_complex(z: &ComplexRational) -> Self {
        let den = lcm(z.re.denom(), z.im.denom());
        let re = z.re.numer() * (&den / z.re.denom());
        let im = z.im.numer() * (&den / z.im.denom());
        Self { re, im, den }
    }

    pub fn from_real(q: &Rational) -> Self {
        Self {
            re: q.numer().clone(),
            im: BigInt::zero(),
            den: q.denom().clone(),
        }
    }

    pub fn to_complex(&self) -> ComplexRational {
        ComplexRational::new(
            reduced(self.re.clone(), self.den.clone()),
            reduced(self.im.clone(), self.den.clone()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn abs2(&self) -> Fraction {
        Fraction {
            num: &self.re * &self.re + &self.im * &self.im,
            den: &self.den * &self.den,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self {
            re: BigInt::one(),
            im: BigInt::zero(),
            den: BigInt::one(),
        };
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Mul for &ComplexFraction {
    type Output = ComplexFraction;
    fn mul(self, o: &ComplexFraction) -> ComplexFraction {
        ComplexFraction {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
            den: &self.den * &o.den,
        }
    }
}

impl Sub for &ComplexFraction {
    type Output = ComplexFraction;
    fn sub(self, o: &ComplexFraction) -> ComplexFraction {
        if self.den == o.den {
            return ComplexFraction {
                re: &self.re - &o.re,
                im: &self.im - &o.im,
                den: self.den.clone(),
            };
        }
        ComplexFraction {
            re: &self.re * &o.den - &o.re * &self.den,
            im: &self.im * &o.den - &o.im * &self.den,
            den: &self.den * &o.den,
        }
    }
}

impl Add for &ComplexFraction {
    type Output = ComplexFraction;
    fn add(self, o: &ComplexFraction) -> ComplexFraction {
        self - &o.neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs2_examples() {
        let z = ComplexRational::new(rat(3, 5), rat(4, 5));
        assert_eq!(abs2(&z), int(1));
        assert_eq!(abs2(&ComplexRational::zero()), int(0));
        assert_eq!(abs2(&ComplexRational::new(int(1), int(1))), int(2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/5").unwrap(), rat(1, 5));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(matches!(
            parse_rational("0.2"),
            Err(ParseRationalError::Malformed(_))
        ));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert_eq!(format_rational(&int(3)), "3/1");
    }

    #[test]
    fn conjugation_is_involution() {
        let z = ComplexRational::new(rat(-2, 7), rat(5, 3));
        assert_eq!(z.conj().conj(), z);
        assert_eq!((&z * &z.conj()).im, int(0));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        for (n, d) in [(2i64, 1i64), (1, 3), (25, 1), (1, 1_000_000_007)] {
            let f = Fraction::new(BigInt::from(n), BigInt::from(d));
            let (lo, hi) = f.sqrt_bounds();
            let q = rat(n, d);
            assert!(&lo * &lo <= q);
            assert!(&hi * &hi >= q);
            assert!(&hi - &lo <= &hi / Rational::from_integer(BigInt::one() << 80));
        }
        let tiny = Fraction::new(BigInt::one(), num_traits::pow(BigInt::from(10), 900));
        let (lo, hi) = tiny.sqrt_bounds();
        assert!(lo.is_positive());
        assert!(&lo * &lo <= tiny.to_rational() && &hi * &hi >= tiny.to_rational());
    }

    #[test]
    fn fraction_order_is_exact() {
        let a = Fraction::new(BigInt::from(2), BigInt::from(4));
        let b = Fraction::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(a, b);
        assert!(Fraction::new(BigInt::from(1), BigInt::from(3)) < b);
    }
}
