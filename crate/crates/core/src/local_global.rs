//! Gluing local frames into global ones.
//!
//! Two routes are implemented:
//!
//! * the operator route: if `A‖f‖² ≤ Σ_j‖T_j f‖² ≤ B‖f‖²` and every
//!   `{T_j g_jk}_k` is a frame for `range(T_j)` with uniform bounds `α, β`,
//!   then `{T_jᵀT_j g_jk}` is a frame with bounds `αA, βB`; conversely the
//!   global and local bounds bound the fusion-type sum;
//! * the envelope route for a coordinate partition `{P_j}`: if
//!   `‖P_r g_jk‖ ≤ c_k(j − r)` off the diagonal, the original `{g_jk}`
//!   remains a frame when the leakage `Σ_k‖c_k‖₁` is small against `α`.
//!
//! For the envelope route two bound candidates are reported. The
//! *statement* form is `(α − Σ, β + Σ)` with `Σ = Σ_k‖c_k‖₁`, conditioned
//! on `Σ < α`. The *proof* form is `((√α − s)², (√β + s)²)` with
//! `s = (Σ_k‖c_k‖₁²)^{1/2}`, conditioned on `s < √α`; it follows from the
//! triangle inequality in ℓ² and Young's inequality for the off-diagonal
//! convolution. Only the proof form is valid without further assumptions;
//! the statement form can undershoot for generators of norm above one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{self, FrameBounds, VectorSystem};
use crate::linalg::{self, Matrix, DEFAULT_MAX_SWEEPS};
use crate::projectors::PartitionProjectors;

/// Generators `g_jk` grouped by patch `j`. Patches may hold different
/// numbers of generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSystem {
    dim: usize,
    patches: Vec<Vec<Vec<f64>>>,
}

impl LocalSystem {
    pub fn new(dim: usize, patches: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if dim == 0 || patches.is_empty() {
            return Err(Error::InvalidInput("local system needs a positive dimension and at least one patch".into()));
        }
        for g in patches.iter().flatten() {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("generator entries must be finite".into()));
            }
        }
        if patches.iter().all(Vec::is_empty) {
            return Err(Error::InvalidInput("local system has no generators".into()));
        }
        Ok(Self { dim, patches })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }

    pub fn patches(&self) -> &[Vec<Vec<f64>>] {
        &self.patches
    }

    /// Largest generator count over patches.
    pub fn max_arity(&self) -> usize {
        self.patches.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The flat system `{g_jk}` labelled `(j,k)`.
    pub fn flatten(&self) -> VectorSystem {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for (j, patch) in self.patches.iter().enumerate() {
            for (k, g) in patch.iter().enumerate() {
                vectors.push(g.clone());
                labels.push(format!("({j},{k})"));
            }
        }
        VectorSystem::new(self.dim, vectors)
            .and_then(|s| s.with_labels(labels))
            .expect("local system invariants")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFamily {
    dim: usize,
    members: Vec<Matrix>,
}

impl OperatorFamily {
    pub fn new(dim: usize, members: Vec<Matrix>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("operator family must be non-empty".into()));
        }
        for m in &members {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            if m.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.rows(),
                });
            }
        }
        Ok(Self { dim, members })
    }

    pub fn from_partition(partition: &PartitionProjectors) -> Self {
        let members = partition
            .to_family()
            .members()
            .iter()
            .map(|p| p.matrix().clone())
            .collect();
        Self {
            dim: partition.dim(),
            members,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[Matrix] {
        &self.members
    }

    /// `Σ_j T_jᵀ T_j`.
    pub fn fusion_operator(&self) -> Matrix {
        let mut s = Matrix::zeros(self.dim, self.dim);
        for t in &self.members {
            s = s.add(&t.gram()).expect("shared dimension");
        }
        s
    }
}

/// Off-diagonal envelope `c_k(m)` for generator index `k`; the value at
/// `m = 0` is always zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSequence {
    pub k: usize,
    pub values: BTreeMap<i64, f64>,
    pub l1: f64,
}

impl EnvelopeSequence {
    pub fn value(&self, m: i64) -> f64 {
        self.values.get(&m).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Hypotheses hold, a bound condition holds, and the resulting bounds
    /// bracket the measured ones.
    Certified,
    HypothesisFailed,
    ConditionFailed,
    /// A condition held but none of the predicted bounds bracket the
    /// measured bounds.
    BoundViolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundForm {
    /// `(αA, βB)` from the operator route.
    Product,
    /// `(α − Σ, β + Σ)`.
    Statement,
    /// `((√α − s)², (√β + s)²)`.
    Proof,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub form: BoundForm,
    pub condition_holds: bool,
    pub bounds: Option<FrameBounds>,
    pub brackets_measured: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlueCertificate {
    pub local: FrameBounds,
    pub candidates: Vec<Candidate>,
    pub measured: FrameBounds,
    pub hypotheses: Vec<HypothesisCheck>,
    pub verdict: Verdict,
}

impl GlueCertificate {
    /// The bounds that produced a `Certified` verdict, if any.
    pub fn predicted(&self) -> Option<(BoundForm, FrameBounds)> {
        if self.verdict != Verdict::Certified {
            return None;
        }
        self.candidates
            .iter()
            .find(|c| c.brackets_measured == Some(true))
            .and_then(|c| c.bounds.map(|b| (c.form, b)))
    }

    pub fn candidate(&self, form: BoundForm) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.form == form)
    }

    /// True when two candidates whose conditions hold disagree on whether
    /// they bracket the measured bounds.
    pub fn candidates_disagree(&self) -> bool {
        let outcomes: Vec<bool> = self.candidates.iter().filter_map(|c| c.brackets_measured).collect();
        outcomes.windows(2).any(|w| w[0] != w[1])
    }
}

fn candidate(
    form: BoundForm,
    condition_holds: bool,
    bounds: FrameBounds,
    measured: &FrameBounds,
    tol: f64,
) -> Candidate {
    if condition_holds {
        Candidate {
            form,
            condition_holds,
            bounds: Some(bounds),
            brackets_measured: Some(bounds.brackets(measured, tol)),
        }
    } else {
        Candidate {
            form,
            condition_holds,
            bounds: None,
            brackets_measured: None,
        }
    }
}

fn decide(hypotheses: &[HypothesisCheck], candidates: &[Candidate]) -> Verdict {
    if hypotheses.iter().any(|h| !h.passed) {
        Verdict::HypothesisFailed
    } else if candidates.iter().all(|c| !c.condition_holds) {
        Verdict::ConditionFailed
    } else if candidates.iter().any(|c| c.brackets_measured == Some(true)) {
        Verdict::Certified
    } else {
        Verdict::BoundViolated
    }
}

/// `{T_jᵀ T_j g_jk}` labelled `(j,k)`.
pub fn assemble_global(ops: &OperatorFamily, local: &LocalSystem) -> Result<VectorSystem> {
    if ops.members.len() != local.patch_count() {
        return Err(Error::DimensionMismatch {
            expected: ops.members.len(),
            found: local.patch_count(),
        });
    }
    if ops.dim != local.dim {
        return Err(Error::DimensionMismatch {
            expected: ops.dim,
            found: local.dim,
        });
    }
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for (j, (t, patch)) in ops.members.iter().zip(&local.patches).enumerate() {
        let tt = t.gram();
        for (k, g) in patch.iter().enumerate() {
            vectors.push(tt.matvec(g)?);
            labels.push(format!("({j},{k})"));
        }
    }
    VectorSystem::new(ops.dim, vectors)?.with_labels(labels)
}

/// Frame bounds of `{T g_k}` as a frame for `range(T)`, computed in an
/// orthonormal basis of the range. Singular values within a decade of the
/// rank threshold `tol·σ_max` make the range ambiguous.
fn range_local_bounds(index: usize, t: &Matrix, generators: &[Vec<f64>], tol: f64) -> Result<FrameBounds> {
    let svd = linalg::svd(t, DEFAULT_MAX_SWEEPS)?;
    let sigma_max = svd.singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max;
    if let Some(&s) = svd
        .singular_values
        .iter()
        .find(|&&s| s > 0.1 * threshold && s < 10.0 * threshold)
    {
        return Err(Error::RankDeficiencyAmbiguous {
            index,
            singular: s,
            threshold,
        });
    }
    let rank = svd.singular_values.iter().filter(|&&s| s > threshold).count();
    if rank == 0 {
        return Ok(FrameBounds::measured(0.0, 0.0));
    }
    if generators.is_empty() {
        return Ok(FrameBounds::measured(0.0, 0.0));
    }
    let d = t.rows();
    let coords = generators
        .iter()
        .map(|g| {
            let tg = t.matvec(g)?;
            Ok((0..rank)
                .map(|c| (0..d).map(|i| svd.u[(i, c)] * tg[i]).sum())
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    frames::frame_bounds(&VectorSystem::new(rank, coords)?, tol)
}

/// Uniform local bounds `(min_j α_j, max_j β_j)` for the operator route.
pub fn operator_local_bounds(ops: &OperatorFamily, local: &LocalSystem, tol: f64) -> Result<(FrameBounds, Vec<FrameBounds>)> {
    let per_patch = ops
        .members
        .iter()
        .zip(&local.patches)
        .enumerate()
        .map(|(j, (t, patch))| range_local_bounds(j, t, patch, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok((uniform(&per_patch), per_patch))
}

fn uniform(per_patch: &[FrameBounds]) -> FrameBounds {
    let lower = per_patch.iter().map(|b| b.lower).fold(f64::INFINITY, f64::min);
    let upper = per_patch.iter().map(|b| b.upper).fold(0.0, f64::max);
    FrameBounds::measured(lower, upper)
}

/// Checks the operator route: predicted `(αA, βB)` against the measured
/// bounds of the assembled system.
pub fn verify_prop_of(ops: &OperatorFamily, local: &LocalSystem, tol: f64) -> Result<GlueCertificate> {
    let global = assemble_global(ops, local)?;
    let fusion = linalg::sym_eig_extremes(&ops.fusion_operator(), tol)?;
    let fusion = FrameBounds::measured(fusion.lambda_min, fusion.lambda_max);
    let (local_bounds, _) = operator_local_bounds(ops, local, tol)?;
    let measured = frames::frame_bounds(&global, tol)?;
    let hypotheses = vec![
        HypothesisCheck {
            name: "operator family lower bound A > tol".into(),
            passed: fusion.lower > tol,
            magnitude: fusion.lower,
        },
        HypothesisCheck {
            name: "uniform local lower bound alpha > tol".into(),
            passed: local_bounds.lower > tol,
            magnitude: local_bounds.lower,
        },
    ];
    let predicted = FrameBounds::predicted(local_bounds.lower * fusion.lower, local_bounds.upper * fusion.upper);
    let candidates = vec![candidate(
        BoundForm::Product,
        predicted.lower > tol,
        predicted,
        &measured,
        tol,
    )];
    let verdict = decide(&hypotheses, &candidates);
    Ok(GlueCertificate {
        local: local_bounds,
        candidates,
        measured,
        hypotheses,
        verdict,
    })
}

/// Bounds on `Σ_j ‖T_j f‖²` implied by uniform local bounds and measured
/// global bounds: `(global.lower / local.upper, global.upper / local.lower)`.
pub fn deduce_fusion_bounds(local_uniform: &FrameBounds, global_measured: &FrameBounds) -> Result<FrameBounds> {
    if local_uniform.lower <= 0.0 {
        return Err(Error::DegenerateLocalBounds);
    }
    Ok(FrameBounds::predicted(
        global_measured.lower / local_uniform.upper,
        global_measured.upper / local_uniform.lower,
    ))
}

/// Minimal off-diagonal envelopes `c_k(m) = max_j ‖P_{j−m} g_jk‖`, `m ≠ 0`.
pub fn envelope(partition: &PartitionProjectors, local: &LocalSystem) -> Result<Vec<EnvelopeSequence>> {
    check_partition(partition, local)?;
    let n = local.patch_count() as i64;
    let mut out = Vec::with_capacity(local.max_arity());
    for k in 0..local.max_arity() {
        let mut values = BTreeMap::new();
        for (j, patch) in local.patches.iter().enumerate() {
            let Some(g) = patch.get(k) else { continue };
            for r in 0..n {
                let m = j as i64 - r;
                if m == 0 {
                    continue;
                }
                let norm = partition.block_norm(r as usize, g);
                if norm > 0.0 {
                    let e = values.entry(m).or_insert(0.0);
                    if norm > *e {
                        *e = norm;
                    }
                }
            }
        }
        let l1 = values.values().fold(0.0, |acc, v| acc + v);
        out.push(EnvelopeSequence { k, values, l1 });
    }
    Ok(out)
}

fn check_partition(partition: &PartitionProjectors, local: &LocalSystem) -> Result<()> {
    if partition.len() != local.patch_count() {
        return Err(Error::DimensionMismatch {
            expected: partition.len(),
            found: local.patch_count(),
        });
    }
    if partition.dim() != local.dim {
        return Err(Error::DimensionMismatch {
            expected: partition.dim(),
            found: local.dim,
        });
    }
    Ok(())
}

/// Per-block bounds of `{P_j g_jk}_k` as frames for the block subspace.
pub fn partition_local_bounds(partition: &PartitionProjectors, local: &LocalSystem, tol: f64) -> Result<Vec<FrameBounds>> {
    check_partition(partition, local)?;
    local
        .patches
        .iter()
        .enumerate()
        .map(|(j, patch)| {
            if patch.is_empty() {
                return Ok(FrameBounds::measured(0.0, 0.0));
            }
            let restricted = patch.iter().map(|g| partition.restrict(j, g)).collect();
            frames::frame_bounds(&VectorSystem::new(partition.blocks()[j].len(), restricted)?, tol)
        })
        .collect()
}

/// Leakage summary of a set of envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    /// `Σ_k ‖c_k‖₁`.
    pub l1_sum: f64,
    /// `(Σ_k ‖c_k‖₁²)^{1/2}`.
    pub l2_of_l1: f64,
}

impl Leakage {
    pub fn from_norms(norms: impl IntoIterator<Item = f64>) -> Self {
        let (sum, sq) = norms.into_iter().fold((0.0, 0.0), |(s, q), x| (s + x, q + x * x));
        Self {
            l1_sum: sum,
            l2_of_l1: sq.sqrt(),
        }
    }
}

/// Statement-form and proof-form candidates from local bounds and leakage.
pub fn envelope_candidates(local: &FrameBounds, leakage: &Leakage, measured: &FrameBounds, tol: f64) -> Vec<Candidate> {
    let (alpha, beta) = (local.lower, local.upper);
    let sigma = leakage.l1_sum;
    let statement = FrameBounds::predicted(alpha - sigma, beta + sigma);
    let s = leakage.l2_of_l1;
    let proof = FrameBounds::predicted((alpha.sqrt() - s).powi(2), (beta.sqrt() + s).powi(2));
    vec![
        candidate(BoundForm::Statement, sigma < alpha - tol, statement, measured, tol),
        candidate(BoundForm::Proof, s < alpha.sqrt() - tol, proof, measured, tol),
    ]
}

/// Checks the envelope route on a coordinate partition.
pub fn theorem_l1_check(partition: &PartitionProjectors, local: &LocalSystem, tol: f64) -> Result<GlueCertificate> {
    let per_block = partition_local_bounds(partition, local, tol)?;
    if let Some((patch, b)) = per_block.iter().enumerate().find(|(_, b)| b.lower <= tol) {
        return Err(Error::LocalNotUniformFrame { patch, lower: b.lower });
    }
    let local_bounds = uniform(&per_block);
    let envelopes = envelope(partition, local)?;
    let leakage = Leakage::from_norms(envelopes.iter().map(|e| e.l1));
    let measured = frames::frame_bounds(&local.flatten(), tol)?;
    let hypotheses = vec![
        HypothesisCheck {
            name: "uniform local lower bound alpha > tol".into(),
            passed: true,
            magnitude: local_bounds.lower,
        },
        HypothesisCheck {
            name: "envelope l1 sum".into(),
            passed: leakage.l1_sum.is_finite(),
            magnitude: leakage.l1_sum,
        },
    ];
    let candidates = envelope_candidates(&local_bounds, &leakage, &measured, tol);
    let verdict = decide(&hypotheses, &candidates);
    Ok(GlueCertificate {
        local: local_bounds,
        candidates,
        measured,
        hypotheses,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_block(eps: f64, delta: f64) -> (PartitionProjectors, LocalSystem) {
        let part = PartitionProjectors::new(2, vec![vec![0], vec![1]]).unwrap();
        let local = LocalSystem::new(2, vec![vec![vec![1.0, eps]], vec![vec![delta, 1.0]]]).unwrap();
        (part, local)
    }

    #[test]
    fn partition_assembly_is_identity() {
        let part = PartitionProjectors::contiguous(&[2, 1]).unwrap();
        let ops = OperatorFamily::from_partition(&part);
        let local = LocalSystem::new(
            3,
            vec![vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], vec![vec![0.0, 0.0, 1.0]]],
        )
        .unwrap();
        let g = assemble_global(&ops, &local).unwrap();
        assert_eq!(g.vectors(), local.flatten().vectors());
        let cert = verify_prop_of(&ops, &local, 1e-10).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        let (form, b) = cert.predicted().unwrap();
        assert_eq!(form, BoundForm::Product);
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        assert_eq!((cert.measured.lower, cert.measured.upper), (1.0, 1.0));
    }

    #[test]
    fn scaled_identity_operator() {
        let ops = OperatorFamily::new(2, vec![Matrix::identity(2).scale(2.0)]).unwrap();
        let local = LocalSystem::new(2, vec![vec![vec![1.0, 0.0]]]).unwrap();
        let g = assemble_global(&ops, &local).unwrap();
        assert_eq!(g.vectors(), &[vec![4.0, 0.0]]);
    }

    #[test]
    fn single_identity_operator_reproduces_frame_bounds() {
        let ops = OperatorFamily::new(2, vec![Matrix::identity(2)]).unwrap();
        let gens = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let local = LocalSystem::new(2, vec![gens.clone()]).unwrap();
        let cert = verify_prop_of(&ops, &local, 1e-10).unwrap();
        let own = frames::frame_bounds(&VectorSystem::new(2, gens).unwrap(), 1e-10).unwrap();
        let (_, b) = cert.predicted().unwrap();
        assert!((b.lower - own.lower).abs() < 1e-14 && (b.upper - own.upper).abs() < 1e-14);
    }

    #[test]
    fn ambiguous_rank_is_an_error() {
        let t = Matrix::from_diag(&[1.0, 1e-10]);
        let ops = OperatorFamily::new(2, vec![t]).unwrap();
        let local = LocalSystem::new(2, vec![vec![vec![1.0, 1.0]]]).unwrap();
        assert!(matches!(
            verify_prop_of(&ops, &local, 1e-10),
            Err(Error::RankDeficiencyAmbiguous { index: 0, .. })
        ));
    }

    #[test]
    fn fusion_deduction_arithmetic() {
        let one = FrameBounds::measured(1.0, 1.0);
        let b = deduce_fusion_bounds(&one, &one).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        let b = deduce_fusion_bounds(&FrameBounds::measured(1.0, 2.0), &FrameBounds::measured(2.0, 4.0)).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 4.0));
        assert_eq!(
            deduce_fusion_bounds(&FrameBounds::measured(0.0, 2.0), &one),
            Err(Error::DegenerateLocalBounds)
        );
    }

    #[test]
    fn envelopes_of_two_blocks() {
        let (part, local) = two_block(0.1, 0.2);
        let env = envelope(&part, &local).unwrap();
        assert_eq!(env.len(), 1);
        // g_{0} leaks into block 1 (m = 0 - 1 = -1), g_{1} into block 0 (m = 1)
        assert_eq!(env[0].value(-1), 0.1);
        assert_eq!(env[0].value(1), 0.2);
        assert_eq!(env[0].value(0), 0.0);
        assert!((env[0].l1 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn block_supported_generators_have_zero_envelope() {
        let part = PartitionProjectors::contiguous(&[2, 2]).unwrap();
        let local = LocalSystem::new(
            4,
            vec![
                vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]],
                vec![vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]],
            ],
        )
        .unwrap();
        assert!(envelope(&part, &local).unwrap().iter().all(|e| e.l1 == 0.0));
        let cert = theorem_l1_check(&part, &local, 1e-10).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        let (_, b) = cert.predicted().unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }

    #[test]
    fn small_leakage_is_certified() {
        let (part, local) = two_block(0.1, 0.1);
        let cert = theorem_l1_check(&part, &local, 1e-10).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        let st = cert.candidate(BoundForm::Statement).unwrap();
        assert!((st.bounds.unwrap().lower - 0.8).abs() < 1e-12);
        // S = [[1.01, 0.2], [0.2, 1.01]] has eigenvalues 0.81 and 1.21
        assert!((cert.measured.lower - 0.81).abs() < 1e-12);
        assert!((cert.measured.upper - 1.21).abs() < 1e-12);
        // 1.21 > 1.2, so the statement upper bound misses
        assert_eq!(st.brackets_measured, Some(false));
        let pf = cert.candidate(BoundForm::Proof).unwrap();
        assert_eq!(pf.brackets_measured, Some(true));
        assert!(cert.candidates_disagree());
    }

    #[test]
    fn large_leakage_fails_condition() {
        let (part, local) = two_block(0.8, 0.8);
        let cert = theorem_l1_check(&part, &local, 1e-10).unwrap();
        assert_eq!(cert.verdict, Verdict::ConditionFailed);
        assert!(cert.candidates.iter().all(|c| c.bounds.is_none()));
        assert!(cert.predicted().is_none());
    }

    #[test]
    fn local_non_frame_is_rejected() {
        let part = PartitionProjectors::contiguous(&[2, 1]).unwrap();
        let local = LocalSystem::new(3, vec![vec![vec![1.0, 0.0, 0.0]], vec![vec![0.0, 0.0, 1.0]]]).unwrap();
        assert!(matches!(
            theorem_l1_check(&part, &local, 1e-10),
            Err(Error::LocalNotUniformFrame { patch: 0, .. })
        ));
    }

    #[test]
    fn patch_count_mismatch() {
        let part = PartitionProjectors::contiguous(&[1, 1]).unwrap();
        let local = LocalSystem::new(2, vec![vec![vec![1.0, 0.0]]]).unwrap();
        assert!(matches!(envelope(&part, &local), Err(Error::DimensionMismatch { .. })));
    }
}
