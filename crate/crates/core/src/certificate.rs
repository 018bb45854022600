//! Serializable certificate records shared by every verification stage.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::{opt_rational_text, ComplexRational, Rational};

/// Outcome of a certificate. `Refuted` means a definite counterexample or a
/// violated exact inequality; `Undecided` is a non-answer (budget exhausted or
/// a prerequisite missing) and never claims anything.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted { reason: String },
    Undecided { reason: String },
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Structural,
    Dominance,
    RootLocalization,
    AnnulusBounds,
    AnnulusInequalities,
    Divisibility,
    Cone,
    ConeBase,
    AnnulusInKn,
    ChartWindow,
    VanishingOrders,
    Escape,
    BoundaryConvergence,
    DiskSamples,
    ChartCovering,
    Disjointness,
    OverlapPolydisk,
    Definiteness,
}

impl CertificateKind {
    /// Row title used by the text report.
    pub fn title(self) -> &'static str {
        match self {
            CertificateKind::Structural => "structure of P_k, f1, f2",
            CertificateKind::Dominance => "dominance on a circle",
            CertificateKind::RootLocalization => "roots of P_k in |λ| < 2^-k",
            CertificateKind::AnnulusBounds => "(1/2)^d_k < |P_k| < 3^d_k on 1 ≤ |λ| ≤ 2",
            CertificateKind::AnnulusInequalities => "annulus inequalities (a)-(d)",
            CertificateKind::Divisibility => "P_k divides the shifted product",
            CertificateKind::Cone => "cone inequality on closure of A_k",
            CertificateKind::ConeBase => "cone inequality for k = 0",
            CertificateKind::AnnulusInKn => "annulus image inside K_n",
            CertificateKind::ChartWindow => "image inside charts 0..n-1",
            CertificateKind::VanishingOrders => "vanishing orders at 0",
            CertificateKind::Escape => "escape index of g_n(0)",
            CertificateKind::BoundaryConvergence => "boundary metric <= 1/n",
            CertificateKind::DiskSamples => "sampled disk in cone neighbourhood",
            CertificateKind::ChartCovering => "charts cover |z1| < r, |z2| < r²",
            CertificateKind::Disjointness => "charts j, k disjoint for |j - k| ≥ 2",
            CertificateKind::OverlapPolydisk => "adjacent overlap is a polydisk",
            CertificateKind::Definiteness => "intersection matrix definiteness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub label: String,
    /// SHA-256 of the family serialization the certificate refers to.
    pub family: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub subdivisions: u64,
    #[serde(
        default,
        with = "opt_rational_text",
        skip_serializing_if = "Option::is_none"
    )]
    pub margin: Option<Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<ComplexRational>,
}

impl Certificate {
    pub fn new(kind: CertificateKind, label: impl Into<String>, family: &str) -> Self {
        Self {
            kind,
            label: label.into(),
            family: family.to_string(),
            verdict: Verdict::Certified,
            checks: Vec::new(),
            subdivisions: 0,
            margin: None,
            counterexamples: Vec::new(),
        }
    }

    /// Records a sub-check; a failing check refutes the certificate unless it
    /// is already refuted or undecided.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        let name = name.into();
        if !passed && self.verdict.is_certified() {
            self.verdict = Verdict::Refuted {
                reason: format!("check `{name}` failed"),
            };
        }
        self.checks.push(Check {
            name,
            passed,
            detail: detail.into(),
        });
    }

    /// Folds a certification error into the verdict. Refutations dominate
    /// non-answers.
    pub fn absorb(&mut self, stage: &str, err: &CertifyError) {
        let reason = format!("{stage}: {err}");
        match err {
            CertifyError::Refuted { point, .. } => {
                if let Some(p) = point {
                    self.counterexamples.push(p.clone());
                }
                if !self.verdict.is_refuted() {
                    self.verdict = Verdict::Refuted { reason };
                }
            }
            _ => {
                if self.verdict.is_certified() {
                    self.verdict = Verdict::Undecided { reason };
                }
            }
        }
        self.checks.push(Check {
            name: stage.to_string(),
            passed: false,
            detail: err.to_string(),
        });
    }

    pub fn is_certified(&self) -> bool {
        self.verdict.is_certified()
    }

    pub fn min_margin(&mut self, margin: &Rational) {
        self.margin = Some(match self.margin.take() {
            Some(m) if &m < margin => m,
            _ => margin.clone(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("subdivision budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("refuted: {reason}")]
    Refuted {
        reason: String,
        point: Option<ComplexRational>,
    },
    #[error("strategy not applicable: {0}")]
    Inapplicable(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
}

impl CertifyError {
    pub fn refuted(reason: impl Into<String>) -> Self {
        CertifyError::Refuted {
            reason: reason.into(),
            point: None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_check_refutes_and_absorb_keeps_refutation() {
        let mut c = Certificate::new(CertificateKind::Divisibility, "k=1", "h");
        c.check("remainder is zero", true, "");
        assert!(c.is_certified());
        c.check("quotient", false, "mismatch");
        assert!(c.verdict.is_refuted());
        c.absorb("dominance", &CertifyError::BudgetExhausted { budget: 8 });
        assert!(c.verdict.is_refuted());
    }

    #[test]
    fn undecided_serializes_with_status_tag() {
        let mut c = Certificate::new(CertificateKind::Cone, "k=1", "h");
        c.absorb("dominance", &CertifyError::BudgetExhausted { budget: 8 });
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["status"], "undecided");
        assert_eq!(json["kind"], "cone");
    }
}
