//! End-to-end verification run over a list of disk indices and report
//! rendering.

use std::fmt::Write as _;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rational, int, opt_rational_text, rational_text, Rational};
use crate::atlas::{atlas_certificates, AtlasPlan};
use crate::certificate::{sha256_hex, Certificate, CertificateKind, CertifyError, Verdict};
use crate::circle::DEFAULT_BUDGET;
use crate::disktrace::{
    annulus_in_kn, combine, cone_certificate, disk_cone_samples, disk_samples, escape_certificate,
    escape_witness, image_chart_window, k0_certificate, sample_windows, sup_metric, sup_metric_certificate, vanishing_orders,
    Orders, SupMetric, TraceReport, REGION_SAMPLES,
};
use crate::family::{build_family_unchecked, cone_radius_ok, structural_checks, FamilyParams, ParamViolation};
use crate::lemmas::{
    annulus_bounds_certificate, corollary_ineq_certificate, lemma_div_check, root_localization,
    root_localization_records,
};

/// Largest disk index accepted unless configured otherwise.
pub const DEFAULT_MAX_N: u32 = 5;
pub const DEFAULT_DISK_SAMPLES: usize = 2000;
pub const DEFAULT_ATLAS_SAMPLES: usize = 10_000;
/// Exact points per boundary circle for the annulus certificates.
pub const ANNULUS_POINTS: usize = 512;
/// Points of `|λ| = 1` for the boundary metric.
pub const METRIC_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_list: Vec<u32>,
    #[serde(with = "rational_text")]
    pub r: Rational,
    #[serde(with = "rational_text")]
    pub rho: Rational,
    #[serde(with = "opt_rational_text", skip_serializing_if = "Option::is_none", default)]
    pub eps_override: Option<Rational>,
    pub unsafe_eps: bool,
    /// Sampled points of `Δ̄₂ ∖ Z` per `n`.
    pub samples: usize,
    /// Samples per atlas search.
    pub atlas_samples: usize,
    /// Arc evaluations allowed per circle certificate.
    pub budget: u64,
    pub seed: u64,
    pub max_n: u32,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_list: vec![2, 3],
            r: Rational::new(1.into(), 5.into()),
            rho: Rational::new(1.into(), 2.into()),
            eps_override: None,
            unsafe_eps: false,
            samples: DEFAULT_DISK_SAMPLES,
            atlas_samples: DEFAULT_ATLAS_SAMPLES,
            budget: DEFAULT_BUDGET,
            seed: 7,
            max_n: DEFAULT_MAX_N,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("no disk index given")]
    EmptyNList,
    #[error("disk index {n} outside 2..={max}")]
    NOutOfRange { n: u32, max: u32 },
    #[error("r = {0} must lie in (0, 1)")]
    RadiusRange(String),
    #[error("rho = {0} must lie in (0, 1)")]
    RhoRange(String),
    #[error("r = {r} exceeds (rho/2)(1 − r) for rho = {rho}")]
    ConeRadius { r: String, rho: String },
    #[error("eps = {0} must be positive")]
    EpsilonSign(String),
    #[error("budget must be positive")]
    ZeroBudget,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return Err(ConfigError::EmptyNList);
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2 || n > self.max_n) {
            return Err(ConfigError::NOutOfRange { n, max: self.max_n });
        }
        let (zero, one) = (int(0), int(1));
        if !(self.r > zero && self.r < one) {
            return Err(ConfigError::RadiusRange(format_rational(&self.r)));
        }
        if !(self.rho > zero && self.rho < one) {
            return Err(ConfigError::RhoRange(format_rational(&self.rho)));
        }
        if !cone_radius_ok(&self.r, &self.rho) {
            return Err(ConfigError::ConeRadius {
                r: format_rational(&self.r),
                rho: format_rational(&self.rho),
            });
        }
        if let Some(e) = &self.eps_override {
            if *e <= zero {
                return Err(ConfigError::EpsilonSign(format_rational(e)));
            }
        }
        if self.budget == 0 {
            return Err(ConfigError::ZeroBudget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NReport {
    pub n: u32,
    pub family: String,
    #[serde(with = "rational_text")]
    pub eps: Rational,
    pub certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub certified: usize,
    pub refuted: usize,
    pub undecided: usize,
    pub escape: Vec<(u32, u32)>,
    /// Checks that span several `n` (escape monotonicity, metric monotonicity).
    pub global: Vec<Certificate>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub generated_at_unix: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub params: RunConfig,
    pub per_n: Vec<NReport>,
    pub atlas: Vec<Certificate>,
    pub summary: Summary,
    pub timing: Timing,
}

impl RunReport {
    pub fn all_certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.per_n
            .iter()
            .flat_map(|r| r.certificates.iter())
            .chain(self.atlas.iter())
            .chain(self.summary.global.iter())
    }

    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }

    /// JSON without the `timing` field, for determinism comparisons.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }
}

/// 0 if everything is certified, 1 on any refutation, 2 on non-answers only.
pub fn exit_code_for<'a>(certs: impl IntoIterator<Item = &'a Certificate>) -> i32 {
    match combine(certs) {
        Verdict::Certified => 0,
        Verdict::Refuted { .. } => 1,
        Verdict::Undecided { .. } => 2,
    }
}

/// Certificates and trace for one disk index.
pub fn verify_n(cfg: &RunConfig, n: u32) -> (NReport, Option<SupMetric>, Option<Orders>) {
    let params = FamilyParams::derive(n, cfg.r.clone(), cfg.rho.clone(), cfg.eps_override.clone())
        .expect("validated configuration");
    let violations = params.violations();
    let tolerated = cfg.unsafe_eps && violations.iter().all(|v| *v == ParamViolation::EpsilonBound);
    let fam = build_family_unchecked(params);
    let mut certs = vec![structural_checks(&fam)];
    if !violations.is_empty() && !tolerated {
        let report = NReport {
            n,
            family: fam.hash(),
            eps: fam.params.eps.clone(),
            certificates: certs,
            trace: None,
        };
        return (report, None, None);
    }

    let roots = root_localization(&fam, cfg.budget);
    certs.extend(root_localization_records(&fam, &roots));
    for k in 1..n as usize {
        certs.push(lemma_div_check(&fam, k).0);
    }
    let (bounds_cert, bounds) = annulus_bounds_certificate(&fam, &roots, ANNULUS_POINTS);
    certs.push(bounds_cert);
    let (ineq_cert, chains) = corollary_ineq_certificate(&fam, bounds.as_ref(), ANNULUS_POINTS);
    certs.push(ineq_cert);

    let kn = annulus_in_kn(&fam, chains.as_ref());
    let disk = disk_samples(&fam, cfg.samples, cfg.seed);
    let windows = sample_windows(&fam, &disk);
    let window = image_chart_window(&fam, chains.as_ref(), &disk, &windows);
    let (cone_samples, histogram) = disk_cone_samples(&fam, &disk, &windows);
    let mut cones = Vec::new();
    for k in 1..n as usize {
        cones.push(cone_certificate(&fam, k, &roots, chains.as_ref(), cfg.budget, cfg.seed));
    }
    let interior = &disk[..disk.len().min(REGION_SAMPLES)];
    let k0 = k0_certificate(&fam, bounds.as_ref(), interior, cfg.seed);
    let (orders_cert, orders) = vanishing_orders(&fam);
    let (escape_cert, escape) = escape_certificate(&fam, orders);
    let metric = sup_metric(&fam, METRIC_POINTS);
    let metric_cert = sup_metric_certificate(&fam, &metric);

    let condition_i = combine([&window, &cone_samples, &k0].into_iter().chain(cones.iter()));
    let condition_ii = combine([&kn]);
    certs.push(kn);
    certs.push(window);
    certs.push(cone_samples);
    certs.extend(cones);
    certs.push(k0);
    certs.push(orders_cert);
    certs.push(escape_cert);
    certs.push(metric_cert);

    let trace = TraceReport {
        n,
        condition_i,
        condition_ii,
        condition_iii: metric.clone(),
        condition_iv: escape,
        orders,
        chart_histogram: histogram,
        disk_samples: disk.len(),
        seed: cfg.seed,
    };
    let report = NReport {
        n,
        family: fam.hash(),
        eps: fam.params.eps.clone(),
        certificates: certs,
        trace: Some(trace),
    };
    (report, Some(metric), Some(orders))
}

/// Runs every stage for each `n` of a validated configuration.
pub fn run_verify(cfg: &RunConfig) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut n_list = cfg.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();

    let mut per_n = Vec::new();
    let mut metrics = Vec::new();
    let mut orders = Vec::new();
    for &n in &n_list {
        let (rep, metric, ord) = verify_n(cfg, n);
        per_n.push(rep);
        if let Some(m) = metric {
            metrics.push(m);
        }
        if let Some(o) = ord {
            orders.push((n, o));
        }
    }

    let atlas = atlas_certificates(&AtlasPlan {
        r: cfg.r.clone(),
        rho: cfg.rho.clone(),
        seed: cfg.seed,
        samples: cfg.atlas_samples,
        max_index: n_list.last().copied().unwrap_or(2) + 1,
    });

    let tag = sha256_hex(
        per_n
            .iter()
            .map(|r| r.family.as_str())
            .collect::<Vec<_>>()
            .join(",")
            .as_bytes(),
    );
    let mut global = Vec::new();
    let mut esc = Certificate::new(CertificateKind::Escape, "all n", &tag);
    let escape = match escape_witness(&orders) {
        Ok(table) => {
            esc.check(
                "escape indices strictly increase with n",
                true,
                table.iter().map(|(n, k)| format!("{n}→{k}")).collect::<Vec<_>>().join(", "),
            );
            table
        }
        Err(e) => {
            esc.absorb("escape", &e);
            Vec::new()
        }
    };
    if orders.len() < per_n.len() {
        esc.absorb(
            "escape",
            &CertifyError::MissingPrerequisite("vanishing orders for every n".into()),
        );
    }
    global.push(esc);
    let mut conv = Certificate::new(CertificateKind::BoundaryConvergence, "all n", &tag);
    let nonincreasing = metrics.windows(2).all(|w| w[1].squared <= w[0].squared);
    conv.check(
        "boundary metric nonincreasing in n",
        nonincreasing,
        metrics
            .iter()
            .map(|m| format!("n={}: ≤ {}", m.n, format_rational(&m.upper)))
            .collect::<Vec<_>>()
            .join(", "),
    );
    global.push(conv);

    let mut summary = Summary {
        certified: 0,
        refuted: 0,
        undecided: 0,
        escape,
        global,
        exit_code: 0,
    };
    let all: Vec<&Certificate> = per_n
        .iter()
        .flat_map(|r| r.certificates.iter())
        .chain(atlas.iter())
        .chain(summary.global.iter())
        .collect();
    for c in &all {
        match c.verdict {
            Verdict::Certified => summary.certified += 1,
            Verdict::Refuted { .. } => summary.refuted += 1,
            Verdict::Undecided { .. } => summary.undecided += 1,
        }
    }
    summary.exit_code = exit_code_for(all);

    let generated_at_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(RunReport {
        params: cfg.clone(),
        per_n,
        atlas,
        summary,
        timing: Timing {
            generated_at_unix,
            elapsed_ms: start.elapsed().as_millis() as u64,
        },
    })
}

fn status_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Certified => "PASS",
        Verdict::Refuted { .. } => "FAIL",
        Verdict::Undecided { .. } => "UNDECIDED",
    }
}

fn cert_line(out: &mut String, c: &Certificate) {
    let _ = write!(out, "  [{:<9}] {:<44} {}", status_word(&c.verdict), c.kind.title(), c.label);
    match &c.verdict {
        Verdict::Certified => {
            if let Some(m) = &c.margin {
                let _ = write!(out, "  (margin {})", approx(m));
            }
        }
        Verdict::Refuted { reason } | Verdict::Undecided { reason } => {
            let _ = write!(out, "  -- {reason}");
        }
    }
    out.push('\n');
}

/// Scientific approximation that survives magnitudes beyond `f64`.
fn approx(q: &Rational) -> String {
    use num_traits::{Signed, ToPrimitive, Zero};
    if q.is_zero() {
        return "0".into();
    }
    match q.to_f64() {
        Some(x) if x != 0.0 && x.is_finite() => format!("≈{x:.3e}"),
        _ => {
            let sign = if q.is_negative() { "-" } else { "" };
            let bits = q.numer().bits() as i64 - q.denom().bits() as i64;
            let exp = (bits as f64 * std::f64::consts::LOG10_2).round() as i64;
            format!("≈{sign}1e{exp}")
        }
    }
}

pub fn render(report: &RunReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(report).expect("report serializes"),
        OutputFormat::Text => render_text(report),
    }
}

fn render_text(report: &RunReport) -> String {
    let p = &report.params;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "noricert verify  r={}  rho={}  seed={}  samples={}  budget={}",
        format_rational(&p.r),
        format_rational(&p.rho),
        p.seed,
        p.samples,
        p.budget
    );
    for rep in &report.per_n {
        let _ = writeln!(out, "\nn = {}  (eps = {})", rep.n, short_rational(&rep.eps));
        for c in &rep.certificates {
            cert_line(&mut out, c);
        }
        if let Some(t) = &rep.trace {
            let _ = writeln!(out, "  conditions: I {}  II {}  III sup ≤ {}  IV escape index {}",
                status_word(&t.condition_i),
                status_word(&t.condition_ii),
                short_rational(&t.condition_iii.upper),
                t.condition_iv.map(|k| k.to_string()).unwrap_or_else(|| "-".into()));
            let total: usize = t.chart_histogram.iter().map(|h| h.1).sum::<usize>().max(1);
            for (k, count) in &t.chart_histogram {
                let bar = "#".repeat((count * 40).div_ceil(total));
                let _ = writeln!(out, "    chart {k:>2} {count:>6} {bar}");
            }
        }
    }
    let _ = writeln!(out, "\natlas");
    for c in &report.atlas {
        cert_line(&mut out, c);
    }
    let _ = writeln!(out, "\nacross n");
    for c in &report.summary.global {
        cert_line(&mut out, c);
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "\n{} certified, {} refuted, {} undecided; exit {}",
        s.certified, s.refuted, s.undecided, s.exit_code
    );
    out
}

/// `1/10^m` style rendering for very small rationals, exact otherwise.
fn short_rational(q: &Rational) -> String {
    let text = format_rational(q);
    if text.len() <= 40 {
        return text;
    }
    approx(q)
}
