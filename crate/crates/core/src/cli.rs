//! Spec files, command runners and reports behind the `framecast` binary.
//!
//! A spec file is one JSON document with a `"kind"` discriminator:
//!
//! ```json
//! {"kind": "vectors", "dim": 2, "vectors": [[1, 0], [0, 1]]}
//! {"kind": "projectors", "dim": 3, "subsets": [[0, 1], [1, 2]]}
//! {"kind": "local", "dim": 2, "blocks": [[0], [1]], "patches": [[[1, 0.1]], [[0.1, 1]]]}
//! {"kind": "ds", "kernel": {"offset": 0, "coeffs": [1, 0.1, 0.01]},
//!  "window_len": 3, "omega": [0], "iterations": 2, "convention": "disjoint"}
//! ```
//!
//! Every runner returns a [`Report`] whose numeric fields carry a
//! [`Provenance`] tag. Runners are deterministic for a fixed seed; only
//! `wall_time_ms`, filled in by the binary, varies between runs.

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynsamp::{self, DsSystemSpec, GammaVariant, GeometricFamily, SupportedVector, SweepRow, WindowConvention};
use crate::error::{Error, Result};
use crate::frames::{self, FrameBounds, VectorSystem};
use crate::linalg::{self, Matrix};
use crate::local_global::{self, BoundForm, LocalSystem, OperatorFamily, Verdict};
use crate::projectors::{self, PartitionProjectors, Projector, ProjectorFamily};

/// Fixed header of the sweep CSV.
pub const SWEEP_HEADER: [&str; 8] = [
    "tau",
    "det_phi",
    "lambda_min",
    "sigma_min",
    "gamma_l1",
    "gamma_l2",
    "cond_l1",
    "cond_l2",
];

/// Number of random probe vectors in every audit.
pub const AUDIT_PROBES: usize = 256;

/// Reference figures quoted for the three-tap geometric kernel at τ = 0.1.
pub const REFERENCE_LOWER_AT_TENTH: f64 = 0.0040;
pub const REFERENCE_GAMMA_AT_TENTH: f64 = 0.0021;
/// Quoted determinant is `5 τ³`.
pub const REFERENCE_DET_COEFFICIENT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub offset: i64,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecFile {
    Vectors {
        dim: usize,
        vectors: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    Projectors {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subsets: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrices: Option<Vec<Vec<Vec<f64>>>>,
    },
    Local {
        dim: usize,
        blocks: Vec<Vec<usize>>,
        patches: Vec<Vec<Vec<f64>>>,
        /// Optional operators `T_j` for the operator route; defaults to the
        /// block projectors.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operators: Option<Vec<Vec<Vec<f64>>>>,
    },
    Ds {
        kernel: KernelSpec,
        window_len: usize,
        omega: Vec<usize>,
        iterations: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        convention: Option<WindowConvention>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stride: Option<usize>,
    },
}

impl SpecFile {
    pub fn kind(&self) -> &'static str {
        match self {
            SpecFile::Vectors { .. } => "vectors",
            SpecFile::Projectors { .. } => "projectors",
            SpecFile::Local { .. } => "local",
            SpecFile::Ds { .. } => "ds",
        }
    }

    pub fn vector_system(&self) -> Result<VectorSystem> {
        match self {
            SpecFile::Vectors { dim, vectors, labels } => {
                let sys = VectorSystem::new(*dim, vectors.clone())?;
                match labels {
                    Some(l) => sys.with_labels(l.clone()),
                    None => Ok(sys),
                }
            }
            other => Err(wrong_kind("vectors", other)),
        }
    }

    pub fn projector_family(&self, tol: f64) -> Result<ProjectorFamily> {
        match self {
            SpecFile::Projectors { dim, subsets, matrices } => match (subsets, matrices) {
                (Some(s), None) => ProjectorFamily::coordinate(*dim, s),
                (None, Some(ms)) => {
                    let members = ms
                        .iter()
                        .map(|rows| Projector::new(Matrix::from_rows(rows)?, tol))
                        .collect::<Result<Vec<_>>>()?;
                    ProjectorFamily::new(*dim, members)
                }
                _ => Err(Error::InvalidInput(
                    "projector spec needs exactly one of \"subsets\" or \"matrices\"".into(),
                )),
            },
            other => Err(wrong_kind("projectors", other)),
        }
    }

    pub fn local_system(&self) -> Result<(PartitionProjectors, LocalSystem, OperatorFamily)> {
        match self {
            SpecFile::Local {
                dim,
                blocks,
                patches,
                operators,
            } => {
                let partition = PartitionProjectors::new(*dim, blocks.clone())?;
                let local = LocalSystem::new(*dim, patches.clone())?;
                let ops = match operators {
                    Some(ms) => OperatorFamily::new(
                        *dim,
                        ms.iter().map(|rows| Matrix::from_rows(rows)).collect::<Result<Vec<_>>>()?,
                    )?,
                    None => OperatorFamily::from_partition(&partition),
                };
                Ok((partition, local, ops))
            }
            other => Err(wrong_kind("local", other)),
        }
    }

    /// The DS spec; `convention_override` wins over the file's convention.
    pub fn ds_spec(&self, convention_override: Option<WindowConvention>) -> Result<DsSystemSpec> {
        match self {
            SpecFile::Ds {
                kernel,
                window_len,
                omega,
                iterations,
                convention,
                stride,
            } => {
                let convention = convention_override.or(*convention).unwrap_or(WindowConvention::Disjoint);
                let spec = DsSystemSpec::new(
                    SupportedVector::new(kernel.offset, kernel.coeffs.clone())?,
                    *window_len,
                    omega.clone(),
                    *iterations,
                    convention,
                )?;
                if let Some(s) = stride {
                    if *s != spec.stride() {
                        return Err(Error::InvalidInput(format!(
                            "stride {s} does not match the {convention:?} convention (stride {})",
                            spec.stride()
                        )));
                    }
                }
                Ok(spec)
            }
            other => Err(wrong_kind("ds", other)),
        }
    }
}

fn wrong_kind(expected: &str, got: &SpecFile) -> Error {
    Error::InvalidInput(format!("expected a \"{expected}\" spec, found \"{}\"", got.kind()))
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Measured,
    TheoremPredicted,
    /// A published figure shown for comparison, never asserted.
    Reference,
}

impl From<frames::Provenance> for Provenance {
    fn from(p: frames::Provenance) -> Self {
        match p {
            frames::Provenance::Measured => Provenance::Measured,
            frames::Provenance::TheoremPredicted => Provenance::TheoremPredicted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
}

impl Quantity {
    pub fn measured(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Measured,
        }
    }

    pub fn predicted(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::TheoremPredicted,
        }
    }

    pub fn reference(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Reference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsPair {
    pub lower: Quantity,
    pub upper: Quantity,
}

impl From<FrameBounds> for BoundsPair {
    fn from(b: FrameBounds) -> Self {
        let p = b.provenance.into();
        Self {
            lower: Quantity {
                value: b.lower,
                provenance: p,
            },
            upper: Quantity {
                value: b.upper,
                provenance: p,
            },
        }
    }
}

/// Brute-force check of a quadratic form against claimed bounds on random
/// unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Audit {
    pub probes: usize,
    pub min_ratio: Quantity,
    pub max_ratio: Quantity,
    pub consistent: bool,
}

/// Samples `probes` Gaussian directions supported on `support` (all of
/// `0..dim` when `None`) and records the extreme values of `form(f)/‖f‖²`.
pub fn audit(
    dim: usize,
    support: Option<std::ops::Range<usize>>,
    bounds: &FrameBounds,
    seed: u64,
    probes: usize,
    form: impl Fn(&[f64]) -> Result<f64>,
) -> Result<Audit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = support.unwrap_or(0..dim);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..probes {
        let mut f = vec![0.0; dim];
        for x in &mut f[support.clone()] {
            *x = StandardNormal.sample(&mut rng);
        }
        let n2 = linalg::dot(&f, &f);
        if n2 == 0.0 {
            continue;
        }
        let ratio = form(&f)? / n2;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let slack = 1e-9 * bounds.upper.max(1.0);
    Ok(Audit {
        probes,
        min_ratio: Quantity::measured(lo),
        max_ratio: Quantity::measured(hi),
        consistent: lo >= bounds.lower - slack && hi <= bounds.upper + slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Certified, or the property holds.
    Pass,
    /// Checked and failed.
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub dim: usize,
    pub vectors: usize,
    pub bounds: BoundsPair,
    pub sigma_min: Quantity,
    pub is_frame: bool,
    pub audit: Audit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub form: BoundForm,
    pub condition_holds: bool,
    pub bounds: Option<BoundsPair>,
    pub brackets_measured: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub name: String,
    pub passed: bool,
    pub magnitude: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub local: BoundsPair,
    pub measured: BoundsPair,
    pub candidates: Vec<CandidateReport>,
    pub hypotheses: Vec<HypothesisReport>,
    pub verdict: Verdict,
    pub chosen: Option<BoundForm>,
    pub candidates_disagree: bool,
}

impl From<&local_global::GlueCertificate> for CertificateReport {
    fn from(c: &local_global::GlueCertificate) -> Self {
        Self {
            local: c.local.into(),
            measured: c.measured.into(),
            candidates: c
                .candidates
                .iter()
                .map(|x| CandidateReport {
                    form: x.form,
                    condition_holds: x.condition_holds,
                    bounds: x.bounds.map(Into::into),
                    brackets_measured: x.brackets_measured,
                })
                .collect(),
            hypotheses: c
                .hypotheses
                .iter()
                .map(|h| HypothesisReport {
                    name: h.name.clone(),
                    passed: h.passed,
                    magnitude: Quantity::measured(h.magnitude),
                })
                .collect(),
            verdict: c.verdict,
            chosen: c.predicted().map(|(f, _)| f),
            candidates_disagree: c.candidates_disagree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub k: usize,
    /// `(m, c_k(m))` pairs with non-zero value.
    pub values: Vec<(i64, Quantity)>,
    pub l1: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2gReport {
    pub dim: usize,
    pub patches: usize,
    pub envelopes: Vec<EnvelopeReport>,
    pub leakage_l1_sum: Quantity,
    pub leakage_l2_of_l1: Quantity,
    pub envelope_route: CertificateReport,
    pub operator_route: std::result::Result<CertificateReport, String>,
    pub audit: Audit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsCmdReport {
    pub convention: WindowConvention,
    pub stride: usize,
    pub local: BoundsPair,
    pub sigma_min: Quantity,
    pub gamma_l2: Quantity,
    pub gamma_l1: Quantity,
    pub gamma_variant: GammaVariant,
    pub predicted: Option<BoundsPair>,
    pub proof_candidate: Option<CandidateReport>,
    pub measured_interior: BoundsPair,
    pub measured_full: BoundsPair,
    pub interior: dynsamp::IndexWindow,
    pub truncation_blocks: usize,
    pub verdict: Verdict,
    pub audit: Audit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFigures {
    pub lower_at_tenth: Quantity,
    pub gamma_at_tenth: Quantity,
    pub det_coefficient: Quantity,
}

impl Default for ReferenceFigures {
    fn default() -> Self {
        Self {
            lower_at_tenth: Quantity::reference(REFERENCE_LOWER_AT_TENTH),
            gamma_at_tenth: Quantity::reference(REFERENCE_GAMMA_AT_TENTH),
            det_coefficient: Quantity::reference(REFERENCE_DET_COEFFICIENT),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: GeometricFamily,
    pub rows: usize,
    pub csv_path: Option<String>,
    /// First τ at which `gamma_l1 < lambda_min` fails.
    pub cond_l1_fails_at: Option<f64>,
    pub cond_l2_fails_at: Option<f64>,
    /// First τ at which `gamma_l1 < sigma_min` fails (the comparison made
    /// with the smallest singular value instead of the frame bound).
    pub sigma_vs_gamma_l1_fails_at: Option<f64>,
    pub sigma_vs_gamma_l2_fails_at: Option<f64>,
    pub reference: ReferenceFigures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionReport {
    pub dim: usize,
    pub members: usize,
    pub bounds: BoundsPair,
    pub complete: bool,
    /// Smallest `ℳ` with `P_j P_k = 0` whenever `|j − k| ≥ ℳ`.
    pub minimal_band: usize,
    pub band: projectors::BandVerdict,
    pub upper_within_band: bool,
    pub q_family: Option<QReport>,
    /// Why `q_family` is absent although it was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_skipped: Option<String>,
    pub audit: Audit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QReport {
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub residuals: projectors::OrthogonalityResiduals,
    pub bounds: BoundsPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ReportBody {
    Bounds(BoundsReport),
    L2g(L2gReport),
    Ds(DsCmdReport),
    Sweep(SweepReport),
    Fusion(FusionReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub invocation: String,
    pub input_digest: String,
    pub seed: u64,
    pub tol: f64,
    pub outcome: Outcome,
    pub body: ReportBody,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Human-readable summary.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("framecast {}", self.invocation));
        line(format!("input sha256 {}", self.input_digest));
        match &self.body {
            ReportBody::Bounds(b) => {
                line(format!("dimension {}, {} vectors", b.dim, b.vectors));
                line(format!(
                    "frame bounds (measured): lower {:.12e}, upper {:.12e}",
                    b.bounds.lower.value, b.bounds.upper.value
                ));
                line(format!("smallest singular value of analysis matrix: {:.12e}", b.sigma_min.value));
                line(format!("frame: {}", if b.is_frame { "yes" } else { "no (Bessel only)" }));
                line(render_audit(&b.audit));
            }
            ReportBody::L2g(r) => {
                line(format!("dimension {}, {} patches", r.dim, r.patches));
                for e in &r.envelopes {
                    let vals: Vec<String> = e.values.iter().map(|(m, q)| format!("{m}:{:.6e}", q.value)).collect();
                    line(format!("envelope c_{} l1 {:.6e} [{}]", e.k, e.l1.value, vals.join(", ")));
                }
                line(format!(
                    "leakage: sum_k |c_k|_1 = {:.12e}, (sum_k |c_k|_1^2)^1/2 = {:.12e}",
                    r.leakage_l1_sum.value, r.leakage_l2_of_l1.value
                ));
                line("envelope route:".into());
                render_certificate(&r.envelope_route, &mut line);
                match &r.operator_route {
                    Ok(c) => {
                        line("operator route (T_j^T T_j g_jk):".into());
                        render_certificate(c, &mut line);
                    }
                    Err(e) => line(format!("operator route unavailable: {e}")),
                }
                line(render_audit(&r.audit));
            }
            ReportBody::Ds(r) => {
                line(format!("convention {:?}, stride {}", r.convention, r.stride));
                line(format!(
                    "local bounds: lower {:.12e}, upper {:.12e}, sigma_min {:.12e}",
                    r.local.lower.value, r.local.upper.value, r.sigma_min.value
                ));
                line(format!("gamma l2 {:.12e}, gamma l1 {:.12e} (using {:?})", r.gamma_l2.value, r.gamma_l1.value, r.gamma_variant));
                match &r.predicted {
                    Some(p) => line(format!("predicted: lower {:.12e}, upper {:.12e}", p.lower.value, p.upper.value)),
                    None => line("predicted: none (gamma >= alpha)".into()),
                }
                if let Some(c) = &r.proof_candidate {
                    line(render_candidate(c));
                }
                line(format!(
                    "measured on interior [{}, {}): lower {:.12e}, upper {:.12e}",
                    r.interior.start,
                    r.interior.end(),
                    r.measured_interior.lower.value,
                    r.measured_interior.upper.value
                ));
                line(format!(
                    "measured on full {}-block truncation: lower {:.12e}, upper {:.12e}",
                    r.truncation_blocks, r.measured_full.lower.value, r.measured_full.upper.value
                ));
                line(format!("verdict {:?}", r.verdict));
                line(render_audit(&r.audit));
            }
            ReportBody::Sweep(s) => {
                line(format!("{} rows{}", s.rows, s.csv_path.as_ref().map(|p| format!(" written to {p}")).unwrap_or_default()));
                let fmt = |t: Option<f64>| t.map_or("holds across the range".to_string(), |t| format!("first fails at tau = {t}"));
                line(format!("gamma_l1 < lambda_min {}", fmt(s.cond_l1_fails_at)));
                line(format!("gamma_l2 < lambda_min {}", fmt(s.cond_l2_fails_at)));
                line(format!("gamma_l1 < sigma_min {}", fmt(s.sigma_vs_gamma_l1_fails_at)));
                line(format!("gamma_l2 < sigma_min {}", fmt(s.sigma_vs_gamma_l2_fails_at)));
                line(format!(
                    "reference figures: lower {} and gamma {} at tau = 0.1, det {} tau^3",
                    s.reference.lower_at_tenth.value, s.reference.gamma_at_tenth.value, s.reference.det_coefficient.value
                ));
            }
            ReportBody::Fusion(f) => {
                line(format!("dimension {}, {} projectors", f.dim, f.members));
                line(format!("fusion bounds: lower {:.12e}, upper {:.12e}", f.bounds.lower.value, f.bounds.upper.value));
                line(format!("complete: {}", f.complete));
                line(format!("minimal band {}", f.minimal_band));
                line(format!(
                    "banded/commuting check with band {}: {}",
                    f.band.band,
                    if f.band.passes { "pass" } else { "fail" }
                ));
                for v in &f.band.violations {
                    line(format!("  ({}, {}) {:?} {:.3e}", v.j, v.k, v.kind, v.magnitude));
                }
                line(format!("upper bound within band cap: {}", f.upper_within_band));
                if let Some(q) = &f.q_family {
                    line(format!(
                        "Q family residuals: idempotency {:.3e}, symmetry {:.3e}, cross {:.3e}",
                        q.residuals.idempotency, q.residuals.symmetry, q.residuals.cross
                    ));
                    line(format!("Q fusion bounds: lower {:.12e}, upper {:.12e}", q.bounds.lower.value, q.bounds.upper.value));
                }
                if let Some(reason) = &f.q_skipped {
                    line(format!("Q family not constructed: {reason}"));
                }
                line(render_audit(&f.audit));
            }
        }
        line(format!("outcome {:?}", self.outcome));
        out
    }
}

fn render_audit(a: &Audit) -> String {
    format!(
        "audit: {} probes, ratio range [{:.12e}, {:.12e}], consistent: {}",
        a.probes, a.min_ratio.value, a.max_ratio.value, a.consistent
    )
}

fn render_candidate(c: &CandidateReport) -> String {
    match &c.bounds {
        Some(b) => format!(
            "  {:?} form: lower {:.12e}, upper {:.12e}, brackets measured: {}",
            c.form,
            b.lower.value,
            b.upper.value,
            c.brackets_measured.unwrap_or(false)
        ),
        None => format!("  {:?} form: condition fails", c.form),
    }
}

fn render_certificate(c: &CertificateReport, line: &mut impl FnMut(String)) {
    line(format!("  local uniform bounds: lower {:.12e}, upper {:.12e}", c.local.lower.value, c.local.upper.value));
    for h in &c.hypotheses {
        line(format!("  hypothesis {}: {} ({:.6e})", h.name, if h.passed { "pass" } else { "fail" }, h.magnitude.value));
    }
    for cand in &c.candidates {
        line(render_candidate(cand));
    }
    line(format!("  measured: lower {:.12e}, upper {:.12e}", c.measured.lower.value, c.measured.upper.value));
    line(format!("  verdict {:?}{}", c.verdict, c.chosen.map(|f| format!(" via {f:?} form")).unwrap_or_default()));
    if c.candidates_disagree {
        line("  note: bound candidates disagree on bracketing".into());
    }
}

/// Inputs shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub invocation: String,
    pub input_digest: String,
    pub tol: f64,
    pub seed: u64,
}

impl Context {
    fn report(&self, outcome: Outcome, body: ReportBody) -> Report {
        Report {
            invocation: self.invocation.clone(),
            input_digest: self.input_digest.clone(),
            seed: self.seed,
            tol: self.tol,
            outcome,
            body,
            wall_time_ms: 0.0,
        }
    }
}

pub fn run_bounds(ctx: &Context, spec: &SpecFile) -> Result<Report> {
    let sys = spec.vector_system()?;
    let verdict = frames::is_frame(&sys, ctx.tol)?;
    let audit = audit(sys.dim(), None, &verdict.bounds, ctx.seed, AUDIT_PROBES, |f| sys.energy(f))?;
    let body = BoundsReport {
        dim: sys.dim(),
        vectors: sys.len(),
        bounds: verdict.bounds.into(),
        sigma_min: Quantity::measured(verdict.bounds.lower.sqrt()),
        is_frame: verdict.is_frame,
        audit,
    };
    let outcome = if verdict.is_frame { Outcome::Pass } else { Outcome::Fail };
    Ok(ctx.report(outcome, ReportBody::Bounds(body)))
}

pub fn run_l2g(ctx: &Context, spec: &SpecFile) -> Result<Report> {
    let (partition, local, ops) = spec.local_system()?;
    let envelopes = local_global::envelope(&partition, &local)?;
    let leakage = local_global::Leakage::from_norms(envelopes.iter().map(|e| e.l1));
    let cert = local_global::theorem_l1_check(&partition, &local, ctx.tol)?;
    let operator_route = local_global::verify_prop_of(&ops, &local, ctx.tol)
        .map(|c| CertificateReport::from(&c))
        .map_err(|e| e.to_string());
    let flat = local.flatten();
    let audit_bounds = cert.predicted().map_or(cert.measured, |(_, b)| b);
    let audit = audit(local.dim(), None, &audit_bounds, ctx.seed, AUDIT_PROBES, |f| flat.energy(f))?;
    let body = L2gReport {
        dim: local.dim(),
        patches: local.patch_count(),
        envelopes: envelopes
            .iter()
            .map(|e| EnvelopeReport {
                k: e.k,
                values: e.values.iter().map(|(m, v)| (*m, Quantity::measured(*v))).collect(),
                l1: Quantity::measured(e.l1),
            })
            .collect(),
        leakage_l1_sum: Quantity::measured(leakage.l1_sum),
        leakage_l2_of_l1: Quantity::measured(leakage.l2_of_l1),
        envelope_route: (&cert).into(),
        operator_route,
        audit,
    };
    let outcome = if cert.verdict == Verdict::Certified { Outcome::Pass } else { Outcome::Fail };
    Ok(ctx.report(outcome, ReportBody::L2g(body)))
}

#[derive(Debug, Clone, Copy)]
pub struct DsOptions {
    pub blocks: usize,
    pub gamma_variant: GammaVariant,
    pub convention: Option<WindowConvention>,
}

impl Default for DsOptions {
    fn default() -> Self {
        Self {
            blocks: 9,
            gamma_variant: GammaVariant::L2,
            convention: None,
        }
    }
}

pub fn run_ds(ctx: &Context, spec: &SpecFile, opts: &DsOptions) -> Result<Report> {
    let ds = spec.ds_spec(opts.convention)?;
    let r = dynsamp::ds_check(&ds, opts.blocks, ctx.tol, opts.gamma_variant)?;
    let global = dynsamp::ds_global_system(&ds, opts.blocks)?;
    let lo = (r.interior.start - global.domain.start) as usize;
    let audit_bounds = r.predicted.unwrap_or(r.measured);
    let audit = audit(
        global.domain.len,
        Some(lo..lo + r.interior.len),
        &audit_bounds,
        ctx.seed,
        AUDIT_PROBES,
        |f| global.system.energy(f),
    )?;
    let body = DsCmdReport {
        convention: ds.convention,
        stride: ds.stride(),
        local: r.local_bounds.into(),
        sigma_min: Quantity::measured(r.local_bounds.lower.sqrt()),
        gamma_l2: Quantity::measured(r.gamma_l2),
        gamma_l1: Quantity::measured(r.gamma_l1),
        gamma_variant: r.gamma_variant,
        predicted: r.predicted.map(Into::into),
        proof_candidate: r.proof_candidate.as_ref().map(|c| CandidateReport {
            form: c.form,
            condition_holds: c.condition_holds,
            bounds: c.bounds.map(Into::into),
            brackets_measured: c.brackets_measured,
        }),
        measured_interior: r.measured.into(),
        measured_full: r.measured_full.into(),
        interior: r.interior,
        truncation_blocks: r.truncation_blocks,
        verdict: r.verdict,
        audit,
    };
    let outcome = if r.verdict == Verdict::Certified { Outcome::Pass } else { Outcome::Fail };
    Ok(ctx.report(outcome, ReportBody::Ds(body)))
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub tau_from: f64,
    pub tau_to: f64,
    pub tau_step: f64,
    pub family: GeometricFamily,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tau_from: 0.01,
            tau_to: 0.5,
            tau_step: 0.01,
            family: GeometricFamily::default(),
        }
    }
}

pub fn sweep_rows(opts: &SweepOptions, tol: f64) -> Result<Vec<SweepRow>> {
    dynsamp::tau_grid(opts.tau_from, opts.tau_to, opts.tau_step)?
        .into_iter()
        .map(|tau| opts.family.row(tau, tol))
        .collect()
}

/// Runs the sweep and, when `out` is given, writes the CSV there.
pub fn run_sweep(ctx: &Context, opts: &SweepOptions, out: Option<&Path>) -> Result<(Report, Vec<SweepRow>)> {
    let rows = sweep_rows(opts, ctx.tol)?;
    if let Some(path) = out {
        let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        write_sweep_csv(file, &rows)?;
    }
    let first = |pred: &dyn Fn(&SweepRow) -> bool| rows.iter().find(|r| !pred(r)).map(|r| r.tau);
    let body = SweepReport {
        family: opts.family,
        rows: rows.len(),
        csv_path: out.map(|p| p.display().to_string()),
        cond_l1_fails_at: first(&|r| r.cond_l1),
        cond_l2_fails_at: first(&|r| r.cond_l2),
        sigma_vs_gamma_l1_fails_at: first(&|r| r.gamma_l1 < r.sigma_min),
        sigma_vs_gamma_l2_fails_at: first(&|r| r.gamma_l2 < r.sigma_min),
        reference: ReferenceFigures::default(),
    };
    Ok((ctx.report(Outcome::Pass, ReportBody::Sweep(body)), rows))
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SWEEP_HEADER).map_err(io)?;
    for r in rows {
        wtr.write_record([
            fmt_f64(r.tau),
            fmt_f64(r.det_phi),
            fmt_f64(r.lambda_min),
            fmt_f64(r.sigma_min),
            fmt_f64(r.gamma_l1),
            fmt_f64(r.gamma_l2),
            u8::from(r.cond_l1).to_string(),
            u8::from(r.cond_l2).to_string(),
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_sweep_csv<R: std::io::Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(Error::InvalidInput("unexpected sweep CSV header".into()));
    }
    let num = |s: &str| -> Result<f64> {
        if s.is_empty() {
            return Ok(f64::NAN);
        }
        s.parse().map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))
    };
    let flag = |s: &str| -> Result<bool> {
        match s {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(Error::InvalidInput(format!("bad flag {s:?}"))),
        }
    };
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            Ok(SweepRow {
                tau: num(&rec[0])?,
                det_phi: num(&rec[1])?,
                lambda_min: num(&rec[2])?,
                sigma_min: num(&rec[3])?,
                gamma_l1: num(&rec[4])?,
                gamma_l2: num(&rec[5])?,
                cond_l1: flag(&rec[6])?,
                cond_l2: flag(&rec[7])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FusionOptions {
    pub band: Option<usize>,
    pub emit_q: bool,
}

/// Smallest band for which no product `P_j P_k` with `|j − k| ≥ band`
/// survives.
pub fn minimal_band(fam: &ProjectorFamily, tol: f64) -> Result<usize> {
    let m = fam.members();
    let mut band = 1;
    for j in 0..m.len() {
        for k in (j + 1)..m.len() {
            if m[j].matrix().matmul(m[k].matrix())?.max_abs() > tol {
                band = band.max(k - j + 1);
            }
        }
    }
    Ok(band)
}

pub fn run_fusion(ctx: &Context, spec: &SpecFile, opts: &FusionOptions) -> Result<Report> {
    let fam = spec.projector_family(ctx.tol)?;
    let bounds = projectors::fusion_bounds(&fam, ctx.tol)?;
    let complete = bounds.lower > ctx.tol;
    let minimal = minimal_band(&fam, ctx.tol)?;
    let band = projectors::check_banded_commuting(&fam, opts.band.unwrap_or(minimal), ctx.tol)?;
    let upper_within_band = bounds.upper <= band.band as f64 + ctx.tol;
    let (q_family, q_skipped) = if opts.emit_q {
        match projectors::disjointify(&fam, ctx.tol) {
            Ok(q) => (
                Some(QReport {
                    matrices: q.members().iter().map(|p| p.matrix().to_rows()).collect(),
                    residuals: projectors::orthogonality_residuals(&q),
                    bounds: projectors::fusion_bounds(&q, ctx.tol)?.into(),
                }),
                None,
            ),
            Err(e @ Error::HypothesisViolated(_)) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    let audit = audit(fam.dim(), None, &bounds, ctx.seed, AUDIT_PROBES, |f| fam.energy(f))?;
    let outcome = if complete && band.passes { Outcome::Pass } else { Outcome::Fail };
    let body = FusionReport {
        dim: fam.dim(),
        members: fam.len(),
        bounds: bounds.into(),
        complete,
        minimal_band: minimal,
        band,
        upper_within_band,
        q_family,
        q_skipped,
        audit,
    };
    Ok(ctx.report(outcome, ReportBody::Fusion(body)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context {
            invocation: "test".into(),
            input_digest: digest(b""),
            tol: 1e-10,
            seed: 7,
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_spec("{\n \"kind\": \"vectors\",\n \"dim\": }").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_spec(r#"{"kind": "circle"}"#), Err(Error::Parse { .. })));
    }

    #[test]
    fn wrong_kind_is_reported() {
        let spec = parse_spec(r#"{"kind": "vectors", "dim": 1, "vectors": [[1]]}"#).unwrap();
        assert!(matches!(spec.ds_spec(None), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bounds_report_for_basis() {
        let spec = parse_spec(r#"{"kind": "vectors", "dim": 2, "vectors": [[1, 0], [0, 1]]}"#).unwrap();
        let r = run_bounds(&ctx(), &spec).unwrap();
        assert_eq!(r.outcome, Outcome::Pass);
        let ReportBody::Bounds(b) = &r.body else { panic!() };
        assert_eq!(b.bounds.lower.value, 1.0);
        assert!(b.audit.consistent);
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn stride_must_match_convention() {
        let spec = parse_spec(
            r#"{"kind": "ds", "kernel": {"offset": 0, "coeffs": [1]}, "window_len": 3,
                "omega": [0], "iterations": 1, "convention": "disjoint", "stride": 2}"#,
        )
        .unwrap();
        assert!(spec.ds_spec(None).is_err());
        assert_eq!(spec.ds_spec(Some(WindowConvention::PaperOverlap)).unwrap().stride(), 2);
    }

    #[test]
    fn minimal_band_of_chain() {
        let fam = ProjectorFamily::coordinate(4, &[vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(minimal_band(&fam, 1e-12).unwrap(), 2);
        let fam = ProjectorFamily::coordinate(2, &[vec![0], vec![1]]).unwrap();
        assert_eq!(minimal_band(&fam, 1e-12).unwrap(), 1);
    }

    #[test]
    fn csv_round_trip_with_missing_determinant() {
        let rows = vec![SweepRow {
            tau: 0.1,
            det_phi: f64::NAN,
            lambda_min: 1.0 / 3.0,
            sigma_min: 2f64.sqrt(),
            gamma_l1: 0.0021,
            gamma_l2: 1e-300,
            cond_l1: true,
            cond_l2: false,
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert!(back[0].det_phi.is_nan());
        assert_eq!(back[0].lambda_min.to_bits(), rows[0].lambda_min.to_bits());
        assert_eq!(back[0].sigma_min.to_bits(), rows[0].sigma_min.to_bits());
        assert_eq!(back[0].gamma_l2.to_bits(), rows[0].gamma_l2.to_bits());
    }
}
