//! Dynamical sampling on ℤ with a finitely supported convolution kernel.
//!
//! The local system on the window `I = {0, …, N}` is
//! `{aᵏ ∗ δᵢ |_I : i ∈ Ω, k = 0, …, K}`. Copies of the window tile ℤ with a
//! fixed stride, and the leakage
//! `γ = Σ_{i∈Ω} Σ_k Σ_{j≠0} ‖aᵏ ∗ δᵢ |_{I_j}‖` measures how much of each
//! generator falls outside its home window. When `γ < α` the glued system
//! on ℤ is predicted to have bounds `(α − γ, β + γ)`.
//!
//! ℓ²(ℤ) is realised on a symmetric truncation of an odd number of
//! windows. Measured bounds are taken on test vectors supported in the
//! middle third of the truncation, where the truncated frame operator
//! agrees exactly with the infinite one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{self, FrameBounds, VectorSystem};
use crate::linalg::{self, Matrix};
use crate::local_global::{self, Candidate, Leakage, LocalSystem, Verdict};
use crate::projectors::PartitionProjectors;

/// A finitely supported sequence on ℤ: `coeffs[n]` sits at `offset + n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportedVector {
    pub offset: i64,
    pub coeffs: Vec<f64>,
}

impl SupportedVector {
    pub fn new(offset: i64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("sequence entries must be finite".into()));
        }
        Ok(Self { offset, coeffs })
    }

    pub fn delta(at: i64) -> Self {
        Self {
            offset: at,
            coeffs: vec![1.0],
        }
    }

    /// Leading and trailing zeros removed; the zero sequence becomes an
    /// empty list at offset 0.
    pub fn trimmed(&self) -> Self {
        let Some(first) = self.coeffs.iter().position(|&x| x != 0.0) else {
            return Self {
                offset: 0,
                coeffs: Vec::new(),
            };
        };
        let last = self.coeffs.iter().rposition(|&x| x != 0.0).expect("non-zero entry exists");
        Self {
            offset: self.offset + first as i64,
            coeffs: self.coeffs[first..=last].to_vec(),
        }
    }

    pub fn at(&self, i: i64) -> f64 {
        let n = i - self.offset;
        if n < 0 {
            return 0.0;
        }
        self.coeffs.get(n as usize).copied().unwrap_or(0.0)
    }

    /// Index of the last stored coefficient.
    pub fn end(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self {
            offset: self.offset + by,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn convolve(&self, other: &SupportedVector) -> SupportedVector {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self {
                offset: self.offset + other.offset,
                coeffs: Vec::new(),
            };
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (n, a) in self.coeffs.iter().enumerate() {
            for (m, b) in other.coeffs.iter().enumerate() {
                coeffs[n + m] += a * b;
            }
        }
        Self {
            offset: self.offset + other.offset,
            coeffs,
        }
    }

    /// Entries on `[start, start + len)`.
    pub fn window(&self, start: i64, len: usize) -> Vec<f64> {
        (0..len as i64).map(|n| self.at(start + n)).collect()
    }
}

impl PartialEq for SupportedVector {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.trimmed(), other.trimmed());
        a.offset == b.offset && a.coeffs == b.coeffs
    }
}

/// `a ∗ a ∗ … ∗ a` with `k` factors; `k = 0` gives `δ₀`.
pub fn conv_power(a: &SupportedVector, k: usize) -> SupportedVector {
    let mut out = SupportedVector::delta(0);
    for _ in 0..k {
        out = out.convolve(a);
    }
    out
}

/// How consecutive windows are laid out on ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowConvention {
    /// Stride `N`: neighbouring windows share an endpoint.
    PaperOverlap,
    /// Stride `N + 1`: windows tile ℤ without overlap.
    Disjoint,
}

/// Which leakage sum drives the `γ < α` condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaVariant {
    /// Sum of ℓ² norms of the windowed tails.
    L2,
    /// Sum of absolute tail entries.
    L1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsSystemSpec {
    pub kernel: SupportedVector,
    /// `N + 1`, the number of points in the window `I = {0, …, N}`.
    pub window_len: usize,
    pub omega: Vec<usize>,
    /// `K`: powers `0..=K` are used.
    pub iterations: usize,
    pub convention: WindowConvention,
}

impl DsSystemSpec {
    pub fn new(
        kernel: SupportedVector,
        window_len: usize,
        omega: Vec<usize>,
        iterations: usize,
        convention: WindowConvention,
    ) -> Result<Self> {
        if window_len == 0 {
            return Err(Error::InvalidInput("window must contain at least one point".into()));
        }
        if omega.is_empty() {
            return Err(Error::InvalidInput("omega must be non-empty".into()));
        }
        if let Some(&i) = omega.iter().find(|&&i| i >= window_len) {
            return Err(Error::InvalidInput(format!("omega index {i} lies outside the window")));
        }
        if kernel.coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("kernel entries must be finite".into()));
        }
        if convention == WindowConvention::PaperOverlap && window_len < 2 {
            return Err(Error::InvalidInput("overlapping windows need at least two points".into()));
        }
        Ok(Self {
            kernel,
            window_len,
            omega,
            iterations,
            convention,
        })
    }

    pub fn stride(&self) -> usize {
        match self.convention {
            WindowConvention::PaperOverlap => self.window_len - 1,
            WindowConvention::Disjoint => self.window_len,
        }
    }

    /// The generators `aᵏ ∗ δᵢ` with labels `(i,k)`, in `(i, k)` order.
    pub fn generators(&self) -> Vec<((usize, usize), SupportedVector)> {
        let powers: Vec<SupportedVector> = (0..=self.iterations).map(|k| conv_power(&self.kernel, k)).collect();
        self.omega
            .iter()
            .flat_map(|&i| {
                powers
                    .iter()
                    .enumerate()
                    .map(move |(k, p)| ((i, k), p.shifted(i as i64)))
            })
            .collect()
    }

    /// Farthest distance any generator reaches from its home index.
    pub fn reach(&self) -> usize {
        let t = self.kernel.trimmed();
        if t.coeffs.is_empty() {
            return 0;
        }
        let k = self.iterations as i64;
        (k * t.offset.abs().max(t.end().abs())) as usize
    }
}

/// `{aᵏ ∗ δᵢ |_I}` as vectors in ℝ^{N+1}.
pub fn ds_local_system(spec: &DsSystemSpec) -> VectorSystem {
    let (labels, vectors): (Vec<String>, Vec<Vec<f64>>) = spec
        .generators()
        .into_iter()
        .map(|((i, k), g)| (format!("({i},{k})"), g.window(0, spec.window_len)))
        .unzip();
    VectorSystem::new(spec.window_len, vectors)
        .and_then(|s| s.with_labels(labels))
        .expect("spec invariants guarantee a valid system")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma {
    pub l2: f64,
    pub l1: f64,
}

/// Per-generator leakage `Σ_{j≠0} ‖g |_{I_j}‖₂` and `‖·‖₁`, in
/// [`DsSystemSpec::generators`] order.
pub fn generator_tails(spec: &DsSystemSpec) -> Vec<Gamma> {
    let stride = spec.stride() as i64;
    let len = spec.window_len;
    spec.generators()
        .iter()
        .map(|(_, g)| {
            let g = g.trimmed();
            if g.coeffs.is_empty() {
                return Gamma { l2: 0.0, l1: 0.0 };
            }
            let j_lo = (g.offset - (len as i64 - 1)).div_euclid(stride);
            let j_hi = g.end().div_euclid(stride);
            let mut tail = Gamma { l2: 0.0, l1: 0.0 };
            for j in j_lo..=j_hi {
                if j == 0 {
                    continue;
                }
                let w = g.window(j * stride, len);
                tail.l2 += linalg::norm2(&w);
                tail.l1 += w.iter().map(|x| x.abs()).sum::<f64>();
            }
            tail
        })
        .collect()
}

pub fn gamma(spec: &DsSystemSpec) -> Gamma {
    generator_tails(spec).iter().fold(Gamma { l2: 0.0, l1: 0.0 }, |acc, t| Gamma {
        l2: acc.l2 + t.l2,
        l1: acc.l1 + t.l1,
    })
}

/// Contiguous index range on ℤ: `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub start: i64,
    pub len: usize,
}

impl IndexWindow {
    pub fn end(&self) -> i64 {
        self.start + self.len as i64
    }

    pub fn contains(&self, i: i64) -> bool {
        i >= self.start && i < self.end()
    }
}

/// The truncated global system on ℤ.
#[derive(Debug, Clone)]
pub struct DsGlobalSystem {
    /// Generators, unclipped, embedded in `domain`.
    pub system: VectorSystem,
    /// Union of the truncated windows plus room for every generator's reach.
    pub domain: IndexWindow,
    /// Union of the truncated windows.
    pub windows: IndexWindow,
    /// Middle third of `windows`.
    pub interior: IndexWindow,
}

/// Realises `{aᵏ ∗ δᵢ : i ∈ Ω_j}` for `blocks` consecutive windows centred
/// on window 0.
pub fn ds_global_system(spec: &DsSystemSpec, blocks: usize) -> Result<DsGlobalSystem> {
    if blocks == 0 || blocks.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("truncation needs an odd number of blocks, got {blocks}")));
    }
    let half = (blocks / 2) as i64;
    let stride = spec.stride() as i64;
    let window_start = -half * stride;
    let window_end = half * stride + spec.window_len as i64;
    let windows = IndexWindow {
        start: window_start,
        len: (window_end - window_start) as usize,
    };
    let third = windows.len / 3;
    let reach = spec.reach();
    if third == 0 || reach > third {
        return Err(Error::TruncationTooSmall {
            reach,
            domain: windows.len,
        });
    }
    let interior = IndexWindow {
        start: windows.start + third as i64,
        len: windows.len - 2 * third,
    };
    let gens = spec.generators();
    let lo = gens.iter().map(|(_, g)| g.offset.min(0)).min().unwrap_or(0);
    let hi = gens.iter().map(|(_, g)| g.end().max(0)).max().unwrap_or(0);
    let domain = IndexWindow {
        start: window_start + lo.min(0),
        len: (window_end - 1 + (hi - (spec.window_len as i64 - 1)).max(0) - (window_start + lo.min(0)) + 1) as usize,
    };
    let mut vectors = Vec::with_capacity(blocks * gens.len());
    let mut labels = Vec::with_capacity(blocks * gens.len());
    for j in -half..=half {
        for ((i, k), g) in &gens {
            let placed = g.shifted(j * stride);
            vectors.push(placed.window(domain.start, domain.len));
            labels.push(format!("({j},{i},{k})"));
        }
    }
    let system = VectorSystem::new(domain.len, vectors)?.with_labels(labels)?;
    Ok(DsGlobalSystem {
        system,
        domain,
        windows,
        interior,
    })
}

/// Extreme eigenvalues of the frame operator compressed to `window`.
pub fn compressed_bounds(global: &DsGlobalSystem, window: IndexWindow, tol: f64) -> Result<FrameBounds> {
    let s = global.system.frame_operator();
    let idx: Vec<usize> = (window.start..window.end())
        .map(|i| (i - global.domain.start) as usize)
        .collect();
    let r = linalg::sym_eig_extremes(&s.principal_submatrix(&idx), tol)?;
    Ok(FrameBounds::measured(r.lambda_min, r.lambda_max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsReport {
    pub local_bounds: FrameBounds,
    pub gamma_l2: f64,
    pub gamma_l1: f64,
    pub gamma_variant: GammaVariant,
    /// `(α − γ, β + γ)` when `γ < α`.
    pub predicted: Option<FrameBounds>,
    /// `((√α − s)², (√β + s)²)` with `s` the ℓ² norm of per-generator
    /// leakages; only offered for disjoint windows.
    pub proof_candidate: Option<Candidate>,
    /// Bounds on interior-supported vectors.
    pub measured: FrameBounds,
    /// Bounds of the whole truncated system, boundary effects included.
    pub measured_full: FrameBounds,
    pub verdict: Verdict,
    pub truncation_blocks: usize,
    pub interior: IndexWindow,
}

/// Checks the leakage condition and compares predicted bounds against a
/// truncated realisation.
pub fn ds_check(spec: &DsSystemSpec, truncation_blocks: usize, tol: f64, variant: GammaVariant) -> Result<DsReport> {
    let local_bounds = frames::frame_bounds(&ds_local_system(spec), tol)?;
    let tails = generator_tails(spec);
    let g = gamma(spec);
    let global = ds_global_system(spec, truncation_blocks)?;
    let measured = compressed_bounds(&global, global.interior, tol)?;
    let measured_full = frames::frame_bounds(&global.system, tol)?;
    let gamma_value = match variant {
        GammaVariant::L2 => g.l2,
        GammaVariant::L1 => g.l1,
    };
    let (alpha, beta) = (local_bounds.lower, local_bounds.upper);
    let predicted = (gamma_value < alpha - tol).then(|| FrameBounds::predicted(alpha - gamma_value, beta + gamma_value));
    let proof_candidate = (spec.convention == WindowConvention::Disjoint).then(|| {
        let leakage = Leakage::from_norms(tails.iter().map(|t| t.l2));
        local_global::envelope_candidates(&local_bounds, &leakage, &measured, tol)
            .into_iter()
            .find(|c| c.form == local_global::BoundForm::Proof)
            .expect("proof candidate is always produced")
    });
    let verdict = match predicted {
        None => Verdict::ConditionFailed,
        Some(p) if p.brackets(&measured, tol) => Verdict::Certified,
        Some(_) => Verdict::BoundViolated,
    };
    Ok(DsReport {
        local_bounds,
        gamma_l2: g.l2,
        gamma_l1: g.l1,
        gamma_variant: variant,
        predicted,
        proof_candidate,
        measured,
        measured_full,
        verdict,
        truncation_blocks,
        interior: global.interior,
    })
}

/// Union of shifted copies `S_{N_j} G₀`. Coordinate 0 of `window_system`
/// sits at ℤ-index 0; copy `j` is moved to start at `shifts[j]` and
/// embedded into `domain`. Copies that would leave the domain are an error.
pub fn shifted_assembly(window_system: &VectorSystem, shifts: &[i64], domain: IndexWindow) -> Result<VectorSystem> {
    let width = window_system.dim() as i64;
    let mut vectors = Vec::with_capacity(shifts.len() * window_system.len());
    let mut labels = Vec::with_capacity(vectors.capacity());
    for (j, &shift) in shifts.iter().enumerate() {
        if shift < domain.start || shift + width > domain.end() {
            return Err(Error::ShiftOutOfDomain {
                shift,
                start: domain.start,
                end: domain.end(),
            });
        }
        let base = (shift - domain.start) as usize;
        for (n, v) in window_system.vectors().iter().enumerate() {
            let mut placed = vec![0.0; domain.len];
            placed[base..base + v.len()].copy_from_slice(v);
            vectors.push(placed);
            let inner = window_system
                .labels()
                .map(|l| l[n].clone())
                .unwrap_or_else(|| n.to_string());
            labels.push(format!("({j},{inner})"));
        }
    }
    if vectors.is_empty() {
        return Err(Error::InvalidInput("no shifts given".into()));
    }
    VectorSystem::new(domain.len, vectors)?.with_labels(labels)
}

/// `{Dⁿ g : 0 ≤ n < L}` over every generator of every patch, for diagonal
/// `D` and block-supported generators.
pub fn diag_ds_system(
    d: &Matrix,
    blocks: &PartitionProjectors,
    generators: &LocalSystem,
    iterations: usize,
) -> Result<VectorSystem> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.rows(),
            cols: d.cols(),
        });
    }
    let dim = d.rows();
    if blocks.dim() != dim || generators.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: generators.dim(),
        });
    }
    if blocks.len() != generators.patch_count() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            found: generators.patch_count(),
        });
    }
    if iterations == 0 {
        return Err(Error::InvalidInput("need at least one iterate".into()));
    }
    for i in 0..dim {
        for j in 0..dim {
            if i != j && d[(i, j)] != 0.0 {
                return Err(Error::InvalidInput("operator must be diagonal".into()));
            }
        }
    }
    let diag: Vec<f64> = (0..dim).map(|i| d[(i, i)]).collect();
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for (j, patch) in generators.patches().iter().enumerate() {
        let block = &blocks.blocks()[j];
        for (k, g) in patch.iter().enumerate() {
            let leaks = g.iter().enumerate().any(|(i, &x)| x != 0.0 && !block.contains(&i));
            if leaks {
                return Err(Error::SupportViolation {
                    patch: j,
                    generator: k,
                });
            }
            let mut current = g.clone();
            for n in 0..iterations {
                vectors.push(current.clone());
                labels.push(format!("({j},{k},{n})"));
                for (c, dv) in current.iter_mut().zip(&diag) {
                    *c *= dv;
                }
            }
        }
    }
    VectorSystem::new(dim, vectors)?.with_labels(labels)
}

/// One row of the three-tap geometric kernel study `a = (1, τ, τ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: f64,
    /// Determinant of the local analysis matrix when it is square.
    pub det_phi: f64,
    pub lambda_min: f64,
    pub sigma_min: f64,
    pub gamma_l1: f64,
    pub gamma_l2: f64,
    pub cond_l1: bool,
    pub cond_l2: bool,
}

/// Parameters of a geometric-kernel sweep: `a(n) = τⁿ` for `n < taps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricFamily {
    pub taps: usize,
    pub window_len: usize,
    pub iterations: usize,
    pub convention: WindowConvention,
}

impl Default for GeometricFamily {
    fn default() -> Self {
        Self {
            taps: 3,
            window_len: 3,
            iterations: 2,
            convention: WindowConvention::Disjoint,
        }
    }
}

impl GeometricFamily {
    pub fn spec(&self, tau: f64) -> Result<DsSystemSpec> {
        let coeffs = (0..self.taps).map(|n| tau.powi(n as i32)).collect();
        DsSystemSpec::new(
            SupportedVector::new(0, coeffs)?,
            self.window_len,
            vec![0],
            self.iterations,
            self.convention,
        )
    }

    pub fn row(&self, tau: f64, tol: f64) -> Result<SweepRow> {
        let spec = self.spec(tau)?;
        let sys = ds_local_system(&spec);
        let phi = frames::analysis_matrix(&sys);
        let det_phi = if phi.is_square() { linalg::determinant(&phi)? } else { f64::NAN };
        let bounds = frames::frame_bounds(&sys, tol)?;
        let g = gamma(&spec);
        Ok(SweepRow {
            tau,
            det_phi,
            lambda_min: bounds.lower,
            sigma_min: bounds.lower.sqrt(),
            gamma_l1: g.l1,
            gamma_l2: g.l2,
            cond_l1: g.l1 < bounds.lower,
            cond_l2: g.l2 < bounds.lower,
        })
    }
}

/// Grid `from, from + step, …` up to and including `to` (within half a
/// step of rounding).
pub fn tau_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from > 0.0 && to >= from && step > 0.0 && from.is_finite() && to.is_finite()) {
        return Err(Error::InvalidInput("need 0 < tau-from <= tau-to and step > 0".into()));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|n| from + n as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(tau: f64) -> DsSystemSpec {
        GeometricFamily::default().spec(tau).unwrap()
    }

    #[test]
    fn square_of_geometric_kernel() {
        let tau = 0.3;
        let a = SupportedVector::new(0, vec![1.0, tau, tau * tau]).unwrap();
        let a2 = conv_power(&a, 2);
        assert_eq!(a2.offset, 0);
        let expect = [1.0, 2.0 * tau, 3.0 * tau * tau, 2.0 * tau.powi(3), tau.powi(4)];
        for (x, y) in a2.coeffs.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn zeroth_power_and_shifts() {
        let a = SupportedVector::new(-2, vec![0.5, 1.0]).unwrap();
        assert_eq!(conv_power(&a, 0), SupportedVector::delta(0));
        assert_eq!(conv_power(&SupportedVector::delta(3), 5), SupportedVector::delta(15));
    }

    #[test]
    fn equality_ignores_padding() {
        let a = SupportedVector::new(-1, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        let b = SupportedVector::new(0, vec![1.0, 2.0]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, b.shifted(1));
    }

    #[test]
    fn local_system_rows() {
        let tau = 0.1;
        let sys = ds_local_system(&geometric(tau));
        assert_eq!(
            sys.vectors(),
            &[
                vec![1.0, 0.0, 0.0],
                vec![1.0, tau, tau * tau],
                vec![1.0, 2.0 * tau, 3.0 * tau * tau]
            ]
        );
    }

    #[test]
    fn identity_kernel_repeats_deltas() {
        let spec = DsSystemSpec::new(SupportedVector::delta(0), 4, vec![1, 3], 2, WindowConvention::Disjoint).unwrap();
        let sys = ds_local_system(&spec);
        assert_eq!(sys.len(), 6);
        assert_eq!(sys.vectors()[2], vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(sys.vectors()[5], vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(gamma(&spec), Gamma { l2: 0.0, l1: 0.0 });
    }

    #[test]
    fn geometric_gamma() {
        let tau: f64 = 0.1;
        let g = gamma(&geometric(tau));
        assert!((g.l1 - 0.0021).abs() < 1e-12);
        assert!((g.l2 - (4.0 * tau.powi(6) + tau.powi(8)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn overlap_convention_counts_shared_endpoints() {
        let tau: f64 = 0.1;
        let mut spec = geometric(tau);
        spec.convention = WindowConvention::PaperOverlap;
        // stride 2: every generator starts at 0, which window -1 = {-2,-1,0}
        // shares; window 1 = {2,3,4} sees τ² from a and 3τ², 2τ³, τ⁴ from a²,
        // and window 2 = {4,5,6} sees τ⁴ again
        let g = gamma(&spec);
        let expect_l1 = 3.0 + 4.0 * tau * tau + 2.0 * tau.powi(3) + 2.0 * tau.powi(4);
        assert!((g.l1 - expect_l1).abs() < 1e-14);
    }

    #[test]
    fn identity_kernel_is_certified() {
        let spec = DsSystemSpec::new(SupportedVector::delta(0), 3, vec![0, 1, 2], 0, WindowConvention::Disjoint).unwrap();
        let r = ds_check(&spec, 9, 1e-10, GammaVariant::L2).unwrap();
        assert_eq!(r.verdict, Verdict::Certified);
        let p = r.predicted.unwrap();
        assert_eq!((p.lower, p.upper), (1.0, 1.0));
        assert_eq!((r.measured.lower, r.measured.upper), (1.0, 1.0));
    }

    #[test]
    fn heavy_tail_fails_condition() {
        let spec = DsSystemSpec::new(
            SupportedVector::new(0, vec![1.0, 2.0]).unwrap(),
            2,
            vec![0],
            2,
            WindowConvention::Disjoint,
        )
        .unwrap();
        let r = ds_check(&spec, 9, 1e-10, GammaVariant::L2).unwrap();
        assert_eq!(r.verdict, Verdict::ConditionFailed);
        assert!(r.predicted.is_none());
    }

    #[test]
    fn truncation_guard() {
        let spec = DsSystemSpec::new(
            SupportedVector::new(0, vec![1.0, 0.1, 0.1, 0.1]).unwrap(),
            2,
            vec![0],
            3,
            WindowConvention::Disjoint,
        )
        .unwrap();
        assert!(matches!(ds_check(&spec, 3, 1e-10, GammaVariant::L2), Err(Error::TruncationTooSmall { .. })));
        assert!(ds_check(&spec, 4, 1e-10, GammaVariant::L2).is_err());
    }

    #[test]
    fn shifted_assembly_basics() {
        let g0 = VectorSystem::new(1, vec![vec![1.0]]).unwrap();
        let sys = shifted_assembly(&g0, &[0, 1, 2], IndexWindow { start: 0, len: 3 }).unwrap();
        assert_eq!(frames::analysis_matrix(&sys), Matrix::identity(3));
        let err = shifted_assembly(&g0, &[3], IndexWindow { start: 0, len: 3 });
        assert!(matches!(err, Err(Error::ShiftOutOfDomain { shift: 3, .. })));
        let w = VectorSystem::new(2, vec![vec![1.0, 2.0]]).unwrap();
        let one = shifted_assembly(&w, &[0], IndexWindow { start: -1, len: 4 }).unwrap();
        assert_eq!(one.vectors(), &[vec![0.0, 1.0, 2.0, 0.0]]);
    }

    #[test]
    fn diagonal_iterates() {
        let d = Matrix::from_diag(&[2.0, 3.0]);
        let blocks = PartitionProjectors::new(2, vec![vec![0], vec![1]]).unwrap();
        let gens = LocalSystem::new(2, vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]]).unwrap();
        let sys = diag_ds_system(&d, &blocks, &gens, 2).unwrap();
        let mut got = sys.vectors().to_vec();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 0.0], vec![0.0, 3.0]];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);

        let id = diag_ds_system(&Matrix::identity(2), &blocks, &gens, 3).unwrap();
        assert_eq!(id.len(), 6);
        assert!(id.vectors()[..3].iter().all(|v| v == &vec![1.0, 0.0]));
    }

    #[test]
    fn diagonal_support_violation() {
        let blocks = PartitionProjectors::new(2, vec![vec![0], vec![1]]).unwrap();
        let gens = LocalSystem::new(2, vec![vec![vec![1.0, 0.5]], vec![vec![0.0, 1.0]]]).unwrap();
        let err = diag_ds_system(&Matrix::identity(2), &blocks, &gens, 1);
        assert!(matches!(err, Err(Error::SupportViolation { patch: 0, generator: 0 })));
    }

    #[test]
    fn sweep_grid() {
        assert_eq!(tau_grid(0.1, 0.1, 0.01).unwrap(), vec![0.1]);
        assert_eq!(tau_grid(0.01, 0.5, 0.01).unwrap().len(), 50);
        assert!(tau_grid(0.0, 0.1, 0.01).is_err());
        assert!(tau_grid(0.2, 0.1, 0.01).is_err());
    }
}
