//! Finite vector systems, their optimal frame bounds, canonical duals and
//! reconstruction.
//!
//! A system `{f_i}` in ℝᵈ is a frame with bounds `α ≤ β` when
//! `α‖f‖² ≤ Σ|⟨f, f_i⟩|² ≤ β‖f‖²` for every `f`. The optimal constants are
//! the extreme eigenvalues of the frame operator `S = ΦᵀΦ`, where the rows
//! of the analysis matrix `Φ` are the `f_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Where a pair of bounds came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Computed directly from the system (optimal bounds).
    Measured,
    /// Produced by a gluing theorem from local data.
    TheoremPredicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub provenance: Provenance,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64, provenance: Provenance) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 || upper < lower {
            return Err(Error::InvalidInput(format!(
                "frame bounds must satisfy 0 <= lower <= upper, got ({lower}, {upper})"
            )));
        }
        Ok(Self {
            lower,
            upper,
            provenance,
        })
    }

    /// Measured bounds from a spectral range. Eigenvalues of a PSD frame
    /// operator can come out as tiny negatives; those are clamped to zero.
    pub fn measured(lambda_min: f64, lambda_max: f64) -> Self {
        let lower = lambda_min.max(0.0);
        Self {
            lower,
            upper: lambda_max.max(lower),
            provenance: Provenance::Measured,
        }
    }

    pub fn predicted(lower: f64, upper: f64) -> Self {
        Self {
            lower: lower.max(0.0),
            upper,
            provenance: Provenance::TheoremPredicted,
        }
    }

    /// True when `inner` lies within `self`, up to `tol` on each side.
    pub fn brackets(&self, inner: &FrameBounds, tol: f64) -> bool {
        inner.lower >= self.lower - tol && inner.upper <= self.upper + tol
    }
}

/// A finite, ordered family of vectors in ℝᵈ. Zero vectors are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorSystem {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl VectorSystem {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidInput("a vector system needs at least one vector".into()));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("vector entries must be finite".into()));
            }
        }
        Ok(Self {
            dim,
            vectors,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vectors.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `(⟨f, f_i⟩)_i`.
    pub fn coefficients(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.len(),
            });
        }
        Ok(self.vectors.iter().map(|v| linalg::dot(v, f)).collect())
    }

    /// `Σ|⟨f, f_i⟩|²`.
    pub fn energy(&self, f: &[f64]) -> Result<f64> {
        Ok(self.coefficients(f)?.iter().map(|c| c * c).sum())
    }

    pub fn frame_operator(&self) -> Matrix {
        analysis_matrix(self).gram()
    }
}

/// Matrix whose rows are the system's vectors.
pub fn analysis_matrix(sys: &VectorSystem) -> Matrix {
    Matrix::from_rows(&sys.vectors).expect("vector system invariants guarantee a valid matrix")
}

/// Optimal frame bounds `(λ_min(S), λ_max(S))`.
pub fn frame_bounds(sys: &VectorSystem, tol: f64) -> Result<FrameBounds> {
    let r = linalg::sym_eig_extremes(&sys.frame_operator(), tol)?;
    Ok(FrameBounds::measured(r.lambda_min, r.lambda_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameVerdict {
    pub is_frame: bool,
    pub bounds: FrameBounds,
}

/// Every finite system is Bessel, so only the lower bound is tested.
pub fn is_frame(sys: &VectorSystem, tol: f64) -> Result<FrameVerdict> {
    let bounds = frame_bounds(sys, tol)?;
    Ok(FrameVerdict {
        is_frame: bounds.lower > tol,
        bounds,
    })
}

/// `{S⁻¹ f_i}`, computed as the rows of `(Φ⁺)ᵀ = U Σ⁻¹ Vᵀ` from a thin SVD
/// of the analysis matrix. This avoids forming `S⁻¹`, whose conditioning is
/// the square of that of `Φ`.
pub fn canonical_dual(sys: &VectorSystem, tol: f64) -> Result<VectorSystem> {
    let bounds = frame_bounds(sys, tol)?;
    if bounds.lower <= tol {
        return Err(Error::NotAFrame {
            lower: bounds.lower,
            tol,
        });
    }
    let phi = analysis_matrix(sys);
    let svd = linalg::svd(&phi, linalg::DEFAULT_MAX_SWEEPS)?;
    let d = sys.dim;
    let duals = (0..sys.len())
        .map(|i| {
            (0..d)
                .map(|c| (0..d).map(|r| svd.u[(i, r)] / svd.singular_values[r] * svd.v[(c, r)]).sum())
                .collect()
        })
        .collect();
    let mut dual = VectorSystem::new(d, duals)?;
    dual.labels = sys.labels.clone();
    Ok(dual)
}

/// `Σ c_i f̃_i`.
pub fn reconstruct(dual: &VectorSystem, coefficients: &[f64]) -> Result<Vec<f64>> {
    if coefficients.len() != dual.len() {
        return Err(Error::DimensionMismatch {
            expected: dual.len(),
            found: coefficients.len(),
        });
    }
    let mut out = vec![0.0; dual.dim];
    for (c, v) in coefficients.iter().zip(&dual.vectors) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    Ok(out)
}
