//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{format_rational, lcm, parse_rational, qadd, qmul, qsub, reduced, ComplexFraction, ComplexRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
}

/// `Σ coeffs[i]·λ^i`, with no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `λ`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Vanishing order at 0: index of the first nonzero coefficient.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| qmul(c, k)).collect())
    }

    /// Multiplies by `λ^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
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

    /// Scales to leading coefficient 1. The zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    /// Long division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let q = qmul(top, &lc_inv);
            for (j, d) in divisor.coeffs.iter().enumerate() {
                if !d.is_zero() {
                    rem[i + j] = qsub(&rem[i + j], &qmul(&q, d));
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        if a.is_zero() && b.is_zero() {
            return Err(PolyError::GcdOfZeros);
        }
        let mut x = a.monic();
        let mut y = b.monic();
        while !y.is_zero() {
            let (_, r) = x.divrem(&y)?;
            x = y;
            y = r.monic();
        }
        Ok(x.monic())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, z: &ComplexRational) -> ComplexRational {
        if self.is_zero() {
            return ComplexRational::zero();
        }
        self.scaled()
            .eval(&ComplexFraction::from_complex(z))
            .to_complex()
    }

    /// Integer-coefficient form over a common denominator.
    pub fn scaled(&self) -> ScaledPoly {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| lcm(&acc, c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        ScaledPoly { nums, den }
    }

    /// `Σ i·|a_i|·R^{i−1}`: a Lipschitz constant for `λ ↦ p(λ)` on the closed
    /// disk of radius `R` (and hence along the circle).
    pub fn lipschitz_bound(&self, radius: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut rp = Rational::one();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += c.abs() * &rp * Rational::from_integer(BigInt::from(i));
            rp *= radius;
        }
        acc
    }

    /// `Σ |a_i|·R^i`, an upper bound for `|p|` on the closed disk of radius `R`.
    pub fn modulus_bound(&self, radius: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut rp = Rational::one();
        for c in &self.coeffs {
            acc += c.abs() * &rp;
            rp *= radius;
        }
        acc
    }

    fn mul_dense(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let a = self.scaled();
        let b = o.scaled();
        let mut out = vec![BigInt::zero(); a.nums.len() + b.nums.len() - 1];
        for (i, x) in a.nums.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.nums.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        let den = &a.den * &b.den;
        Poly::new(
            out.into_iter()
                .map(|c| reduced(c, den.clone()))
                .collect(),
        )
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| qadd(&self.coeff(i), &o.coeff(i))).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| qsub(&self.coeff(i), &o.coeff(i))).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.mul_dense(o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "({})λ", format_rational(c))?,
                _ => write!(f, "({})λ^{}", format_rational(c), i)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        text.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = Vec::<String>::deserialize(d)?;
        let coeffs = text
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

/// `p(λ) = (1/den)·Σ nums[i]·λ^i` with integer `nums`. Evaluation runs in
/// Gaussian integers and never reduces, which is what keeps sampling at
/// thousand-digit scales affordable.
#[derive(Clone, Debug)]
pub struct ScaledPoly {
    nums: Vec<BigInt>,
    den: BigInt,
}

impl ScaledPoly {
    pub fn degree(&self) -> Option<usize> {
        self.nums.len().checked_sub(1)
    }

    pub fn eval(&self, z: &ComplexFraction) -> ComplexFraction {
        let Some(deg) = self.degree() else {
            return ComplexFraction::new(BigInt::zero(), BigInt::zero(), BigInt::one());
        };
        // Horner on the homogenized form Σ nums[i]·re^i·den_z^{deg−i}.
        let mut re = self.nums[deg].clone();
        let mut im = BigInt::zero();
        let mut den_pow = BigInt::one();
        for i in (0..deg).rev() {
            den_pow *= &z.den;
            let nre = &re * &z.re - &im * &z.im;
            let nim = &re * &z.im + &im * &z.re;
            re = nre + &self.nums[i] * &den_pow;
            im = nim;
        }
        ComplexFraction::new(re, im, &self.den * den_pow)
    }
}
