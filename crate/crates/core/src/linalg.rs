//! Small dense real linear algebra.
//!
//! Everything the rest of the crate needs lives here: a row-major [`Matrix`],
//! a cyclic Jacobi eigensolver for symmetric matrices, Cholesky solves,
//! a one-sided Jacobi SVD and an LU determinant. Dimensions are desk scale
//! (a few hundred at most), so the algorithms favour accuracy over speed.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default cap on Jacobi sweeps.
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting empty shapes and
    /// non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row and one column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `Aᵀ A`, formed so that the result is exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                if row[i] == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest entry of `|A - Aᵀ|`. Only meaningful for square matrices.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Matrix {
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    /// Principal submatrix on the given (sorted or not) index list.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Extreme eigenvalues of a symmetric matrix together with the worst
/// eigen-equation residual `‖Mv − λv‖₂` observed for the two extremes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRange {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub residual: f64,
}

/// Full eigendecomposition; eigenvalues ascending, eigenvectors as the
/// matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }
}

fn check_symmetric(m: &Matrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let allowed = tol * (1.0 + m.max_abs());
    let asymmetry = m.asymmetry();
    if asymmetry > allowed {
        return Err(Error::NotSymmetric { asymmetry, allowed });
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of `(M + Mᵀ)/2`.
pub fn sym_eigen(m: &Matrix, tol: f64, max_sweeps: usize) -> Result<SymEigen> {
    check_symmetric(m, tol)?;
    let n = m.rows;
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off == 0.0 {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off.sqrt(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // negligible against both diagonal entries: drop it
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate_sym(&mut a, p, q, c, s, t);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(SymEigen {
        values,
        vectors,
        sweeps,
    })
}

fn rotate_sym(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64, t: f64) {
    let n = a.rows;
    let apq = a[(p, q)];
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
}

pub fn sym_eig_extremes(m: &Matrix, tol: f64) -> Result<SpectralRange> {
    sym_eig_extremes_with(m, tol, DEFAULT_MAX_SWEEPS)
}

/// Smallest and largest eigenvalue of the symmetrized matrix. Fails with
/// `NoConvergence` if the sweep cap is hit or the residual of either
/// extreme eigenpair exceeds `tol·‖M‖₂`.
pub fn sym_eig_extremes_with(m: &Matrix, tol: f64, max_sweeps: usize) -> Result<SpectralRange> {
    let eig = sym_eigen(m, tol, max_sweeps)?;
    let n = eig.values.len();
    let lambda_min = eig.values[0];
    let lambda_max = eig.values[n - 1];
    let sym = m.symmetrized();
    let residual = [0, n - 1]
        .iter()
        .map(|&k| eigen_residual(&sym, eig.values[k], &eig.vector(k)))
        .fold(0.0, f64::max);
    let scale = lambda_min.abs().max(lambda_max.abs());
    if residual > tol * scale {
        return Err(Error::NoConvergence {
            sweeps: eig.sweeps,
            residual,
        });
    }
    Ok(SpectralRange {
        lambda_min,
        lambda_max,
        residual,
    })
}

fn eigen_residual(m: &Matrix, lambda: f64, v: &[f64]) -> f64 {
    let mv = m.matvec(v).expect("square matrix and matching vector");
    mv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Lower-triangular Cholesky factor `L` with `M = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(m: &Matrix, tol: f64) -> Result<Self> {
        check_symmetric(m, tol)?;
        let n = m.rows;
        let a = m.symmetrized();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotSpd { row: j, pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.l.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        Ok(y)
    }
}

/// Solves `M x = b` for symmetric positive-definite `M`, followed by one
/// step of iterative refinement.
pub fn solve_spd(m: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let chol = Cholesky::new(m, DEFAULT_TOL)?;
    let mut x = chol.solve(b)?;
    let r: Vec<f64> = m.matvec(&x)?.iter().zip(b).map(|(mx, bi)| bi - mx).collect();
    let dx = chol.solve(&r)?;
    for (xi, di) in x.iter_mut().zip(dx) {
        *xi += di;
    }
    Ok(x)
}

/// Thin singular value decomposition `A = U Σ Vᵀ` from one-sided Jacobi.
/// Singular values are sorted descending; `u` is `rows × cols`, with zero
/// columns where the singular value vanishes.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: Matrix,
    pub v: Matrix,
}

pub fn svd(a: &Matrix, max_sweeps: usize) -> Result<Svd> {
    let (m, n) = (a.rows, a.cols);
    // Work on contiguous columns.
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    // Correlations below ε²‖A‖²_F are rounding noise between numerically
    // null columns; rotating them never settles.
    let floor = f64::EPSILON * f64::EPSILON * a.frobenius().powi(2);
    // Rounding in a length-m dot product is of order √m·ε.
    let orth = (m.max(1) as f64).sqrt() * f64::EPSILON;
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        let mut residual: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let (left, right) = u.split_at_mut(q);
                let (up, uq) = (&mut left[p], &mut right[0]);
                let alpha = dot(up, up);
                let beta = dot(uq, uq);
                let gamma = dot(up, uq);
                if gamma.abs() <= orth * (alpha * beta).sqrt() || gamma.abs() <= floor {
                    continue;
                }
                rotated = true;
                residual = residual.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(up, uq, c, s);
                let (left, right) = v.split_at_mut(q);
                rotate(&mut left[p], &mut right[0], c, s);
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence { sweeps, residual });
        }
    }
    let norms: Vec<f64> = u.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut su = Matrix::zeros(m, n);
    let mut sv = Matrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        for i in 0..m {
            su[(i, dst)] = if sigma > 0.0 { u[src][i] / sigma } else { 0.0 };
        }
        for i in 0..n {
            sv[(i, dst)] = v[src][i];
        }
    }
    Ok(Svd {
        singular_values,
        u: su,
        v: sv,
    })
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (p, q) = (*a, *b);
        *a = c * p - s * q;
        *b = s * p + c * q;
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .expect("non-empty range");
        if a[(pivot, col)] == 0.0 {
            return Ok(0.0);
        }
        if pivot != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for i in (col + 1)..n {
            let f = a[(i, col)] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[(i, k)] -= f * a[(col, k)];
            }
        }
    }
    Ok(det)
}
