//! Certified root counts in open disks `|λ| < R`.
//!
//! There is no general argument-principle integrator here. A count is built
//! from evidence the caller describes with a [`CountHint`]: elementary
//! polynomials (constants, monomials, linear factors) are counted exactly,
//! products add the counts of their factors, previously certified counts are
//! reused when every root already sits in a smaller disk, and a Rouché split
//! `p = A − B` with certified `|B| < |A|` on the circle transfers the count of
//! `A` to `p`.

use num_traits::{Signed, Zero};

use crate::arith::{format_rational, Rational};
use crate::certificate::{Certificate, CertificateKind, CertifyError};
use crate::circle::{certify_dominance, CircleSpec, DominanceCertificate};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCountCertificate {
    pub poly: Poly,
    pub radius: Rational,
    /// Roots in the open disk, with multiplicity.
    pub count: u64,
    pub evidence: CountEvidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountEvidence {
    /// Nonzero constant: no roots.
    Constant,
    /// `c·λ^m`: an `m`-fold root at 0.
    Monomial { degree: u64 },
    /// `a + bλ` with the single root `−a/b`.
    Linear { root: Rational },
    /// `p = c·Π f_i^{e_i}` checked coefficientwise.
    Product {
        factors: Vec<(RootCountCertificate, u32)>,
    },
    /// Every root of `p` already lies in a smaller disk (or none in a larger one).
    Enclosed { inner: Box<RootCountCertificate> },
    /// `p = A − B` with `|B| < |A|` on the circle; `count(p) = count(A)`.
    Rouche {
        dominance: DominanceCertificate,
        dominant: Box<RootCountCertificate>,
    },
}

/// How to obtain a count; see the module docs.
#[derive(Debug, Clone)]
pub enum CountHint {
    Elementary,
    Known(RootCountCertificate),
    Product(Vec<(Poly, u32, CountHint)>),
    Split {
        dominant: Poly,
        hint: Box<CountHint>,
    },
}

impl RootCountCertificate {
    /// All roots (with multiplicity) are inside the disk.
    pub fn is_complete(&self) -> bool {
        self.poly.degree() == Some(self.count as usize)
    }

    /// Total number of subdivision arcs used by nested dominance certificates.
    pub fn subdivisions(&self) -> u64 {
        match &self.evidence {
            CountEvidence::Constant | CountEvidence::Monomial { .. } | CountEvidence::Linear { .. } => 0,
            CountEvidence::Product { factors } => factors.iter().map(|(c, _)| c.subdivisions()).sum(),
            CountEvidence::Enclosed { inner } => inner.subdivisions(),
            CountEvidence::Rouche {
                dominance,
                dominant,
            } => dominance.subdivision_count + dominant.subdivisions(),
        }
    }

    /// Smallest dominance margin in the evidence tree, if any.
    pub fn min_margin(&self) -> Option<Rational> {
        match &self.evidence {
            CountEvidence::Constant | CountEvidence::Monomial { .. } | CountEvidence::Linear { .. } => None,
            CountEvidence::Product { factors } => factors
                .iter()
                .filter_map(|(c, _)| c.min_margin())
                .min(),
            CountEvidence::Enclosed { inner } => inner.min_margin(),
            CountEvidence::Rouche {
                dominance,
                dominant,
            } => Some(match dominant.min_margin() {
                Some(m) if m < dominance.margin => m,
                _ => dominance.margin.clone(),
            }),
        }
    }

    pub fn to_record(&self, label: &str, family: &str) -> Certificate {
        let mut c = Certificate::new(CertificateKind::RootLocalization, label, family);
        c.subdivisions = self.subdivisions();
        c.margin = self.min_margin();
        c.check(
            format!("{} roots in |λ| < {}", self.count, format_rational(&self.radius)),
            true,
            self.evidence_summary(),
        );
        c
    }

    fn evidence_summary(&self) -> String {
        match &self.evidence {
            CountEvidence::Constant => "nonzero constant".into(),
            CountEvidence::Monomial { degree } => format!("monomial of degree {degree}"),
            CountEvidence::Linear { root } => format!("linear, root {}", format_rational(root)),
            CountEvidence::Product { factors } => format!("product of {} factors", factors.len()),
            CountEvidence::Enclosed { inner } => {
                format!("enclosed by radius {}", format_rational(&inner.radius))
            }
            CountEvidence::Rouche { dominance, .. } => format!(
                "dominance on the circle, {} arcs",
                dominance.subdivision_count
            ),
        }
    }
}

/// Counts the roots of `p` in `|λ| < radius` following `hint`.
pub fn count_roots_in_disk(
    p: &Poly,
    radius: &Rational,
    hint: &CountHint,
    budget: u64,
) -> Result<RootCountCertificate, CertifyError> {
    if p.is_zero() {
        return Err(CertifyError::Inapplicable("zero polynomial".into()));
    }
    let circle = CircleSpec::new(radius.clone())?;
    let make = |count: u64, evidence: CountEvidence| RootCountCertificate {
        poly: p.clone(),
        radius: radius.clone(),
        count,
        evidence,
    };
    match hint {
        CountHint::Elementary => count_elementary(p, radius).map(|(n, e)| make(n, e)),
        CountHint::Known(cert) => {
            if &cert.poly != p {
                return Err(CertifyError::Inapplicable(
                    "known certificate is for a different polynomial".into(),
                ));
            }
            if &cert.radius == radius {
                return Ok(cert.clone());
            }
            let deg = p.degree().unwrap_or(0) as u64;
            if (&cert.radius < radius && cert.count == deg) || (&cert.radius > radius && cert.count == 0) {
                Ok(make(
                    cert.count,
                    CountEvidence::Enclosed {
                        inner: Box::new(cert.clone()),
                    },
                ))
            } else {
                Err(CertifyError::Inapplicable(
                    "known count does not transfer to this radius".into(),
                ))
            }
        }
        CountHint::Product(factors) => {
            let mut product = Poly::one();
            let mut certs = Vec::with_capacity(factors.len());
            let mut total = 0u64;
            for (f, e, h) in factors {
                let c = count_roots_in_disk(f, radius, h, budget)?;
                total += c.count * *e as u64;
                product = &product * &f.pow(*e);
                certs.push((c, *e));
            }
            let scale = match (p.leading(), product.leading()) {
                (Some(a), Some(b)) => a / b,
                _ => return Err(CertifyError::Inapplicable("empty product".into())),
            };
            if product.scale(&scale) != *p {
                return Err(CertifyError::Inapplicable(
                    "factors do not multiply to the polynomial".into(),
                ));
            }
            Ok(make(total, CountEvidence::Product { factors: certs }))
        }
        CountHint::Split { dominant, hint } => {
            let dominated = dominant - p;
            let dominance = certify_dominance(dominant, &dominated, &circle, budget)?;
            let inner = count_roots_in_disk(dominant, radius, hint, budget)?;
            Ok(make(
                inner.count,
                CountEvidence::Rouche {
                    dominance,
                    dominant: Box::new(inner),
                },
            ))
        }
    }
}

fn count_elementary(p: &Poly, radius: &Rational) -> Result<(u64, CountEvidence), CertifyError> {
    let deg = p.degree().expect("nonzero");
    let nonzero = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    if deg == 0 {
        return Ok((0, CountEvidence::Constant));
    }
    if nonzero == 1 {
        return Ok((deg as u64, CountEvidence::Monomial { degree: deg as u64 }));
    }
    if deg == 1 {
        let root = -p.coeff(0) / p.coeff(1);
        let m = root.abs();
        if &m == radius {
            return Err(CertifyError::Inapplicable("root lies on the circle".into()));
        }
        let count = u64::from(&m < radius);
        return Ok((count, CountEvidence::Linear { root }));
    }
    Err(CertifyError::Inapplicable(format!(
        "degree {deg} polynomial is not elementary"
    )))
}
