//! Orthogonal projector families: fusion bounds, completeness, the banded
//! commuting hypothesis, and the disjointification `Q₁ = P₁`,
//! `Qₙ = Pₙ − Pₙ Σ_{k<n} Q_k`.
//!
//! Family members are indexed from 0. The order of a family matters for
//! [`disjointify`], which processes members in the order given.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameBounds;
use crate::linalg::{self, Matrix};

/// A symmetric idempotent matrix, validated at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    matrix: Matrix,
    tol: f64,
}

impl Projector {
    /// Validates `‖P − Pᵀ‖_max ≤ tol` and `‖P² − P‖_max ≤ tol`. Near misses
    /// are rejected, never rounded to the nearest projector.
    pub fn new(matrix: Matrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let symmetry = matrix.asymmetry();
        let idempotency = matrix.matmul(&matrix)?.sub(&matrix)?.max_abs();
        if symmetry > tol || idempotency > tol {
            return Err(Error::InvalidProjector {
                symmetry,
                idempotency,
                tol,
            });
        }
        Ok(Self { matrix, tol })
    }

    /// Coordinate projector onto the listed indices.
    pub fn coordinate(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut diag = vec![0.0; dim];
        for &i in indices {
            if i >= dim {
                return Err(Error::InvalidInput(format!("index {i} outside dimension {dim}")));
            }
            diag[i] = 1.0;
        }
        Ok(Self {
            matrix: Matrix::from_diag(&diag),
            tol: 0.0,
        })
    }

    /// Orthogonal projector onto the span of the columns of `basis`, which
    /// must be orthonormal.
    pub fn from_orthonormal_columns(basis: &Matrix, tol: f64) -> Result<Self> {
        Self::new(basis.matmul(&basis.transpose())?, tol)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorFamily {
    dim: usize,
    members: Vec<Projector>,
}

impl ProjectorFamily {
    pub fn new(dim: usize, members: Vec<Projector>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("projector family must be non-empty".into()));
        }
        for p in &members {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        Ok(Self { dim, members })
    }

    pub fn coordinate(dim: usize, subsets: &[Vec<usize>]) -> Result<Self> {
        let members = subsets
            .iter()
            .map(|s| Projector::coordinate(dim, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, members)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Projector] {
        &self.members
    }

    /// `Σ_j P_j`, the fusion frame operator.
    pub fn fusion_operator(&self) -> Matrix {
        let mut s = Matrix::zeros(self.dim, self.dim);
        for p in &self.members {
            s = s.add(p.matrix()).expect("shared dimension");
        }
        s
    }

    /// `Σ_j ‖P_j f‖²`.
    pub fn energy(&self, f: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.members {
            let pf = p.apply(f)?;
            total += linalg::dot(&pf, &pf);
        }
        Ok(total)
    }
}

/// Pairwise-disjoint coordinate blocks covering `{0, …, dim−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionProjectors {
    dim: usize,
    blocks: Vec<Vec<usize>>,
}

impl PartitionProjectors {
    pub fn new(dim: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("partition needs at least one block".into()));
        }
        let mut owner = vec![None; dim];
        for (j, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidInput(format!("block {j} is empty")));
            }
            for &i in block {
                if i >= dim {
                    return Err(Error::InvalidInput(format!("index {i} outside dimension {dim}")));
                }
                if let Some(prev) = owner[i] {
                    return Err(Error::InvalidInput(format!(
                        "index {i} appears in blocks {prev} and {j}"
                    )));
                }
                owner[i] = Some(j);
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidInput(format!("index {i} is not covered by any block")));
        }
        Ok(Self { dim, blocks })
    }

    /// Consecutive blocks with the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            blocks.push((start..start + s).collect());
            start += s;
        }
        Self::new(start, blocks)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Restriction of `v` to block `j`, in block coordinates.
    pub fn restrict(&self, j: usize, v: &[f64]) -> Vec<f64> {
        self.blocks[j].iter().map(|&i| v[i]).collect()
    }

    /// `‖P_j v‖`.
    pub fn block_norm(&self, j: usize, v: &[f64]) -> f64 {
        self.blocks[j].iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt()
    }

    pub fn to_family(&self) -> ProjectorFamily {
        ProjectorFamily::coordinate(self.dim, &self.blocks).expect("validated partition")
    }
}

/// Optimal fusion bounds: extreme eigenvalues of `Σ_j P_j`.
pub fn fusion_bounds(fam: &ProjectorFamily, tol: f64) -> Result<FrameBounds> {
    let r = linalg::sym_eig_extremes(&fam.fusion_operator(), tol)?;
    Ok(FrameBounds::measured(r.lambda_min, r.lambda_max))
}

/// The common kernel is trivial iff `Σ_j P_j` is positive definite.
pub fn is_complete(fam: &ProjectorFamily, tol: f64) -> Result<bool> {
    Ok(fusion_bounds(fam, tol)?.lower > tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// `‖P_j P_k − P_k P_j‖_max` above tolerance.
    NonCommuting,
    /// `‖P_j P_k‖_max` above tolerance although `|j − k| ≥ band`.
    BandOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub j: usize,
    pub k: usize,
    pub kind: ViolationKind,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandVerdict {
    pub band: usize,
    pub passes: bool,
    pub violations: Vec<Violation>,
}

/// Checks that all members commute and that `P_j P_k = 0` whenever
/// `|j − k| ≥ band`.
pub fn check_banded_commuting(fam: &ProjectorFamily, band: usize, tol: f64) -> Result<BandVerdict> {
    if band == 0 {
        return Err(Error::InvalidInput("band must be a positive integer".into()));
    }
    let mut violations = Vec::new();
    let m = fam.members();
    for j in 0..m.len() {
        for k in (j + 1)..m.len() {
            let jk = m[j].matrix().matmul(m[k].matrix())?;
            let kj = m[k].matrix().matmul(m[j].matrix())?;
            let comm = jk.sub(&kj)?.max_abs();
            if comm > tol {
                violations.push(Violation {
                    j,
                    k,
                    kind: ViolationKind::NonCommuting,
                    magnitude: comm,
                });
            }
            if k - j >= band {
                let overlap = jk.max_abs();
                if overlap > tol {
                    violations.push(Violation {
                        j,
                        k,
                        kind: ViolationKind::BandOverlap,
                        magnitude: overlap,
                    });
                }
            }
        }
    }
    Ok(BandVerdict {
        band,
        passes: violations.is_empty(),
        violations,
    })
}

/// Builds the mutually orthogonal family `Q₁ = P₁`, `Qₙ = Pₙ − Pₙ R`,
/// `R = Σ_{k<n} Q_k`. Requires a commuting family.
pub fn disjointify(fam: &ProjectorFamily, tol: f64) -> Result<ProjectorFamily> {
    // every band passes the overlap test when it equals the family length,
    // so only commutation is checked here
    let verdict = check_banded_commuting(fam, fam.len().max(1), tol)?;
    if let Some(v) = verdict.violations.first() {
        return Err(Error::HypothesisViolated(format!(
            "projectors {} and {} do not commute (magnitude {:e})",
            v.j, v.k, v.magnitude
        )));
    }
    let d = fam.dim();
    let mut running = Matrix::zeros(d, d);
    let mut qs = Vec::with_capacity(fam.len());
    for p in fam.members() {
        let pm = p.matrix();
        let q = pm.sub(&pm.matmul(&running)?)?;
        running = running.add(&q)?;
        qs.push(Projector {
            matrix: q,
            tol: p.tol().max(tol),
        });
    }
    ProjectorFamily::new(d, qs)
}

/// Worst-case algebraic defects of a family: idempotency, symmetry, and
/// pairwise products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityResiduals {
    pub idempotency: f64,
    pub symmetry: f64,
    pub cross: f64,
}

pub fn orthogonality_residuals(fam: &ProjectorFamily) -> OrthogonalityResiduals {
    let mut r = OrthogonalityResiduals {
        idempotency: 0.0,
        symmetry: 0.0,
        cross: 0.0,
    };
    let m = fam.members();
    for (i, p) in m.iter().enumerate() {
        let pm = p.matrix();
        let sq = pm.matmul(pm).expect("square");
        r.idempotency = r.idempotency.max(sq.sub(pm).expect("same shape").max_abs());
        r.symmetry = r.symmetry.max(pm.asymmetry());
        for q in &m[i + 1..] {
            r.cross = r.cross.max(pm.matmul(q.matrix()).expect("square").max_abs());
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_family(diags: &[&[f64]]) -> ProjectorFamily {
        let members = diags
            .iter()
            .map(|d| Projector::new(Matrix::from_diag(d), 1e-12).unwrap())
            .collect();
        ProjectorFamily::new(diags[0].len(), members).unwrap()
    }

    #[test]
    fn partition_is_resolution_of_identity() {
        let fam = PartitionProjectors::new(3, vec![vec![0], vec![1], vec![2]]).unwrap().to_family();
        let b = fusion_bounds(&fam, 1e-12).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        assert!(is_complete(&fam, 1e-10).unwrap());
        assert!(check_banded_commuting(&fam, 1, 1e-12).unwrap().passes);
    }

    #[test]
    fn overlapping_diagonal_pair() {
        let fam = diag_family(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]]);
        let b = fusion_bounds(&fam, 1e-12).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 2.0));
        assert!(is_complete(&fam, 1e-10).unwrap());
        let q = disjointify(&fam, 1e-12).unwrap();
        assert_eq!(q.members()[0].matrix(), &Matrix::from_diag(&[1.0, 1.0, 0.0]));
        assert_eq!(q.members()[1].matrix(), &Matrix::from_diag(&[0.0, 0.0, 1.0]));
    }

    #[test]
    fn single_projector_not_complete() {
        let fam = diag_family(&[&[1.0, 0.0]]);
        assert!(!is_complete(&fam, 1e-10).unwrap());
    }

    #[test]
    fn banded_three_member_family() {
        let fam = diag_family(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 1.0]]);
        assert!(check_banded_commuting(&fam, 2, 1e-12).unwrap().passes);
        // with band 1, P1 P2 must vanish but does not
        let v = check_banded_commuting(&fam, 1, 1e-12).unwrap();
        assert!(!v.passes);
        assert!(v.violations.iter().all(|x| x.kind == ViolationKind::BandOverlap));
    }

    #[test]
    fn non_commuting_pair_is_reported() {
        // P1 = ½[[1,1],[1,1]], P2 = diag(1,0):
        // P1P2 = ½[[1,0],[1,0]], P2P1 = ½[[1,1],[0,0]], difference max 0.5
        let p1 = Projector::new(Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(), 1e-12).unwrap();
        let p2 = Projector::coordinate(2, &[0]).unwrap();
        let fam = ProjectorFamily::new(2, vec![p1, p2]).unwrap();
        let v = check_banded_commuting(&fam, 2, 1e-12).unwrap();
        assert!(!v.passes);
        assert_eq!(v.violations.len(), 1);
        assert_eq!(v.violations[0].kind, ViolationKind::NonCommuting);
        assert!((v.violations[0].magnitude - 0.5).abs() < 1e-15);
        assert!(matches!(disjointify(&fam, 1e-12), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn identity_family_is_fixed() {
        let fam = diag_family(&[&[1.0, 1.0]]);
        assert_eq!(disjointify(&fam, 1e-12).unwrap(), fam);
    }

    #[test]
    fn rejects_near_projectors() {
        let m = Matrix::from_diag(&[1.0 + 1e-7, 0.0]);
        assert!(matches!(Projector::new(m, 1e-10), Err(Error::InvalidProjector { .. })));
    }

    #[test]
    fn partition_validation() {
        assert!(PartitionProjectors::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(PartitionProjectors::new(3, vec![vec![0, 1]]).is_err());
        assert!(PartitionProjectors::new(2, vec![vec![0], vec![]]).is_err());
        let p = PartitionProjectors::contiguous(&[2, 1]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
    }
}
