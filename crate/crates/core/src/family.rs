//! The polynomial disk family for a fixed disk index `n`.
//!
//! For `n ≥ 2` the construction fixes integers `c_1..c_{n-1}` (forward
//! recursion from `c_1 = 1`), `d_1..d_{n-1}` (backward recursion from
//! `d_{n-1} = 1`) and `N = 2n(d_1 + … + d_{n-1} + 1)`, a rational `ε` below
//! `(1/6)^N · r/(n+2)`, and polynomials
//!
//! ```text
//! P_{n-1} = ε^{c_{n-1}} − λ
//! P_k     = ε^{c_k} − P_{k+1}·P_{k+2}²⋯P_{n-1}^{n-k-1}·λ^{n-k}
//! f_1     = ε·P_1·P_2²⋯P_{n-1}^{n-1}·λ^n
//! f_2     = ε²·P_1·P_2⋯P_{n-1}·λ
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{int, rational_text, rpow, Rational};
use crate::certificate::{sha256_hex, Certificate, CertificateKind};
use crate::poly::{Poly, ScaledPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("disk index n = {0} is below the minimum 2")]
    IndexTooSmall(u32),
    #[error("parameter violation: {0}")]
    Violation(ParamViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamViolation {
    #[error("r must lie in (0, 1)")]
    RadiusRange,
    #[error("rho must lie in (0, 1)")]
    RhoRange,
    #[error("r ≤ (rho/2)(1 − r) fails")]
    ConeRadius,
    #[error("eps must be positive")]
    EpsilonSign,
    #[error("eps < (1/6)^N · r/(n+2) fails")]
    EpsilonBound,
    #[error("constants c, d, N do not match the recursions")]
    Constants,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub c: Vec<u64>,
    pub d: Vec<u64>,
    #[serde(rename = "N")]
    pub big_n: u64,
}

/// `c_k = 2k − 1 + Σ_{j<k} (k − j)·c_j`, `d_k = Σ_{j>k} (j − k)·d_j + n − k`.
pub fn make_constants(n: u32) -> Result<Constants, FamilyError> {
    if n < 2 {
        return Err(FamilyError::IndexTooSmall(n));
    }
    let m = (n - 1) as usize;
    let mut c = vec![0u64; m];
    for k in 1..=m {
        let mut ck = 2 * k as u64 - 1;
        for j in 1..k {
            ck += (k - j) as u64 * c[j - 1];
        }
        c[k - 1] = ck;
    }
    let mut d = vec![0u64; m];
    for k in (1..=m).rev() {
        let mut dk = (n as u64) - k as u64;
        for j in k + 1..=m {
            dk += (j - k) as u64 * d[j - 1];
        }
        d[k - 1] = dk;
    }
    let big_n = 2 * n as u64 * (d.iter().sum::<u64>() + 1);
    Ok(Constants { c, d, big_n })
}

/// The strict upper bound `(1/6)^N · r/(n+2)` on `ε`.
pub fn epsilon_bound(n: u32, big_n: u64, r: &Rational) -> Rational {
    rpow(&int(6), -(big_n as i64)) * r / int(n as i64 + 2)
}

/// `10^{-m}` for the smallest `m` with `10^{-m} < (1/6)^N · r/(n+2)`.
pub fn choose_epsilon(n: u32, r: &Rational) -> Result<Rational, FamilyError> {
    let consts = make_constants(n)?;
    let bound = epsilon_bound(n, consts.big_n, r);
    let mut eps = Rational::one();
    let tenth = Rational::new(BigInt::one(), BigInt::from(10));
    while eps >= bound {
        eps *= &tenth;
    }
    Ok(eps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub n: u32,
    #[serde(with = "rational_text")]
    pub r: Rational,
    #[serde(with = "rational_text")]
    pub rho: Rational,
    #[serde(with = "rational_text")]
    pub eps: Rational,
    pub c: Vec<u64>,
    pub d: Vec<u64>,
    #[serde(rename = "N")]
    pub big_n: u64,
}

impl FamilyParams {
    /// Derives the constants for `n` and picks `ε` with [`choose_epsilon`]
    /// unless an explicit value is given. Does not validate; see
    /// [`FamilyParams::violations`].
    pub fn derive(
        n: u32,
        r: Rational,
        rho: Rational,
        eps: Option<Rational>,
    ) -> Result<Self, FamilyError> {
        let consts = make_constants(n)?;
        let eps = match eps {
            Some(e) => e,
            None => choose_epsilon(n, &r)?,
        };
        Ok(Self {
            n,
            r,
            rho,
            eps,
            c: consts.c,
            d: consts.d,
            big_n: consts.big_n,
        })
    }

    pub fn violations(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        let zero = Rational::zero();
        let one = Rational::one();
        if !(self.r > zero && self.r < one) {
            out.push(ParamViolation::RadiusRange);
        }
        if !(self.rho > zero && self.rho < one) {
            out.push(ParamViolation::RhoRange);
        }
        if !cone_radius_ok(&self.r, &self.rho) {
            out.push(ParamViolation::ConeRadius);
        }
        if !self.eps.is_positive() {
            out.push(ParamViolation::EpsilonSign);
        }
        match make_constants(self.n) {
            Ok(k) if k.c == self.c && k.d == self.d && k.big_n == self.big_n => {}
            _ => out.push(ParamViolation::Constants),
        }
        if self.eps >= epsilon_bound(self.n, self.big_n, &self.r) {
            out.push(ParamViolation::EpsilonBound);
        }
        out
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        match self.violations().into_iter().next() {
            Some(v) => Err(FamilyError::Violation(v)),
            None => Ok(()),
        }
    }

    pub fn eps_pow(&self, exp: u64) -> Rational {
        rpow(&self.eps, exp as i64)
    }

    /// `c_k`, 1-based.
    pub fn c_k(&self, k: usize) -> u64 {
        self.c[k - 1]
    }

    /// `d_k`, 1-based.
    pub fn d_k(&self, k: usize) -> u64 {
        self.d[k - 1]
    }
}

/// `r ≤ (ρ/2)(1 − r)`, equality allowed.
pub fn cone_radius_ok(r: &Rational, rho: &Rational) -> bool {
    r <= &(rho / int(2) * (int(1) - r))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Family {
    #[serde(flatten)]
    pub params: FamilyParams,
    #[serde(rename = "P")]
    pub p: Vec<Poly>,
    pub f1: Poly,
    pub f2: Poly,
    #[serde(skip)]
    cache: Option<EvalCache>,
}

#[derive(Debug, Clone)]
struct EvalCache {
    f1: ScaledPoly,
    f2: ScaledPoly,
    hash: String,
}

/// Validates `params` and builds the family.
pub fn build_family(params: FamilyParams) -> Result<Family, FamilyError> {
    params.validate()?;
    Ok(build_family_unchecked(params))
}

/// Builds the family without validating the parameters. Used to exercise
/// refutation paths with out-of-bound `ε`.
pub fn build_family_unchecked(params: FamilyParams) -> Family {
    let m = (params.n - 1) as usize;
    let mut p: Vec<Poly> = vec![Poly::zero(); m];
    for k in (1..=m).rev() {
        let mut tail = Poly::monomial(Rational::one(), params.n as usize - k);
        for j in k + 1..=m {
            tail = &tail * &p[j - 1].pow((j - k) as u32);
        }
        p[k - 1] = &Poly::constant(params.eps_pow(params.c_k(k))) - &tail;
    }
    let mut f1 = Poly::monomial(params.eps.clone(), params.n as usize);
    let mut f2 = Poly::monomial(params.eps_pow(2), 1);
    for (idx, pk) in p.iter().enumerate() {
        f1 = &f1 * &pk.pow(idx as u32 + 1);
        f2 = &f2 * pk;
    }
    let mut fam = Family {
        params,
        p,
        f1,
        f2,
        cache: None,
    };
    fam.cache = Some(EvalCache {
        f1: fam.f1.scaled(),
        f2: fam.f2.scaled(),
        hash: sha256_hex(fam.to_json().as_bytes()),
    });
    fam
}

impl Family {
    pub fn n(&self) -> u32 {
        self.params.n
    }

    /// `P_k`, 1-based.
    pub fn pk(&self, k: usize) -> &Poly {
        &self.p[k - 1]
    }

    /// `Π P_j^{e_j} · λ^{lambda_exp}` for the listed `(j, e_j)`.
    pub fn product(&self, factors: &[(usize, u32)], lambda_exp: usize) -> Poly {
        let mut acc = Poly::monomial(Rational::one(), lambda_exp);
        for &(j, e) in factors {
            if e > 0 {
                acc = &acc * &self.pk(j).pow(e);
            }
        }
        acc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("family serializes")
    }

    /// SHA-256 of the JSON serialization.
    pub fn hash(&self) -> String {
        match &self.cache {
            Some(c) => c.hash.clone(),
            None => sha256_hex(self.to_json().as_bytes()),
        }
    }

    pub fn f1_scaled(&self) -> ScaledPoly {
        self.cache
            .as_ref()
            .map(|c| c.f1.clone())
            .unwrap_or_else(|| self.f1.scaled())
    }

    pub fn f2_scaled(&self) -> ScaledPoly {
        self.cache
            .as_ref()
            .map(|c| c.f2.clone())
            .unwrap_or_else(|| self.f2.scaled())
    }

    /// Replaces `P_k` (1-based) without rebuilding `f_1`, `f_2`. Test hook for
    /// tampering.
    pub fn with_replaced_pk(mut self, k: usize, poly: Poly) -> Self {
        self.p[k - 1] = poly;
        let hash = sha256_hex(self.to_json().as_bytes());
        if let Some(c) = self.cache.as_mut() {
            c.hash = hash;
        }
        self
    }
}

/// Whether the leading coefficient has modulus one.
///
/// The backward recursion alternates the sign of the leading coefficient
/// (`P_{n-1} = ε^c − λ` has leading coefficient −1), so "monic" is checked up
/// to sign; that is all the factorization `|P_k(λ)| = Π|λ − root|` needs.
pub fn has_unit_leading(p: &Poly) -> bool {
    p.leading().is_some_and(|lc| lc.abs().is_one())
}

/// Remarks-level structural checks on a built family.
pub fn structural_checks(fam: &Family) -> Certificate {
    let params = &fam.params;
    let n = params.n as usize;
    let mut cert = Certificate::new(
        CertificateKind::Structural,
        format!("n={n}"),
        &fam.hash(),
    );
    let violations = params.violations();
    cert.check(
        "parameter invariants",
        violations.is_empty(),
        violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; "),
    );
    for k in 1..n {
        let pk = fam.pk(k);
        cert.check(
            format!("P_{k} has unit leading coefficient"),
            has_unit_leading(pk),
            "",
        );
        cert.check(
            format!("deg P_{k} = d_{k} = {}", params.d_k(k)),
            pk.degree() == Some(params.d_k(k) as usize),
            format!("{:?}", pk.degree()),
        );
        cert.check(
            format!("P_{k}(0) = eps^{}", params.c_k(k)),
            pk.coeff(0) == params.eps_pow(params.c_k(k)) && !pk.coeff(0).is_zero(),
            "",
        );
    }
    for j in 1..n {
        for k in j + 1..n {
            let deg = Poly::gcd(fam.pk(j), fam.pk(k))
                .ok()
                .and_then(|g| g.degree());
            cert.check(
                format!("gcd(P_{j}, P_{k}) has degree 0"),
                deg == Some(0),
                format!("{deg:?}"),
            );
        }
    }
    let sum_d: u64 = params.d.iter().sum();
    let weighted: u64 = params
        .d
        .iter()
        .enumerate()
        .map(|(i, d)| (i as u64 + 1) * d)
        .sum();
    cert.check(
        format!("deg f2 = {}", sum_d + 1),
        fam.f2.degree() == Some((sum_d + 1) as usize),
        format!("{:?}", fam.f2.degree()),
    );
    cert.check(
        format!("deg f1 = {}", weighted + n as u64),
        fam.f1.degree() == Some((weighted + n as u64) as usize),
        format!("{:?}", fam.f1.degree()),
    );
    cert
}
