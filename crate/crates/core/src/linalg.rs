//! Sparse matrices, symmetric solvers and rank utilities shared by the
//! mesh, cochain and index modules.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Below this many unknowns symmetric systems are solved densely.
pub const DENSE_SOLVE_LIMIT: usize = 2000;

/// Default relative rank threshold on singular values.
pub const RANK_RTOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("solver failed to converge: relative residual {residual:e} after {iterations} iterations")]
    SolverFailure { iterations: usize, residual: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("rank is ambiguous: singular value {value:e} within a factor 10 of threshold {threshold:e}")]
    AmbiguousRank { value: f64, threshold: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Compressed sparse row matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate entries are summed
    /// and exact zeros are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            rows[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        let mut m = CsrMatrix { nrows, ncols, indptr, indices, values };
        m.prune();
        m
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(d.len(), d.len(), &t)
    }

    fn prune(&mut self) {
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        indptr.push(0);
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr.push(indices.len());
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over the stored entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "mul_vec dimension mismatch");
        (0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// `selfᵀ x` without materializing the transpose.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "tr_mul_vec dimension mismatch");
        let mut y = vec![0.0; self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            if xr != 0.0 {
                for (c, v) in self.row(r) {
                    y[c] += v * xr;
                }
            }
        }
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut t = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        CsrMatrix::from_triplets(self.nrows, other.ncols, &t)
    }

    /// `diag(left) · self · diag(right)`.
    pub fn scale(&self, left: Option<&[f64]>, right: Option<&[f64]>) -> CsrMatrix {
        let mut m = self.clone();
        for r in 0..m.nrows {
            for k in m.indptr[r]..m.indptr[r + 1] {
                let c = m.indices[k];
                if let Some(l) = left {
                    m.values[k] *= l[r];
                }
                if let Some(rt) = right {
                    m.values[k] *= rt[c];
                }
            }
        }
        m
    }

    /// Restriction to the given rows and columns (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (j, &c) in cols.iter().enumerate() {
            col_map[c] = j;
        }
        let mut t = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_map[c] != usize::MAX {
                    t.push((i, col_map[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(rows.len(), cols.len(), &t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }
}

/// Outcome of a conjugate-gradient run.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite `a`.
pub fn pcg(a: &CsrMatrix, b: &[f64], rtol: f64, max_iter: usize) -> Result<CgOutcome, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(LinalgError::DimensionMismatch(format!("pcg: {}x{} with rhs {}", n, a.ncols(), b.len())));
    }
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(CgOutcome { solution: vec![0.0; n], iterations: 0, relative_residual: 0.0 });
    }
    let inv_diag: Vec<f64> = a
        .diag()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        let ap = a.mul_vec(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = norm(&r) / bnorm;
        if res <= rtol {
            return Ok(CgOutcome { solution: x, iterations: it + 1, relative_residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // recompute the true residual before giving up
    let ax = a.mul_vec(&x);
    let res = norm(&b.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>()) / bnorm;
    if res <= rtol {
        Ok(CgOutcome { solution: x, iterations: max_iter, relative_residual: res })
    } else {
        Err(LinalgError::SolverFailure { iterations: max_iter, residual: res })
    }
}

/// Solves a symmetric positive definite system; dense Cholesky below
/// [`DENSE_SOLVE_LIMIT`] unknowns, preconditioned CG (relative residual 1e-12) above.
pub fn solve_spd(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    SpdSolver::new(a.clone())?.solve(b)
}

/// A symmetric positive definite system prepared for repeated right-hand sides.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Dense(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Iterative(CsrMatrix),
}

impl SpdSolver {
    pub fn new(a: CsrMatrix) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", a.nrows(), a.ncols())));
        }
        if a.nrows() < DENSE_SOLVE_LIMIT {
            let chol = a.to_dense().cholesky().ok_or(LinalgError::NotPositiveDefinite)?;
            Ok(SpdSolver::Dense(chol))
        } else {
            Ok(SpdSolver::Iterative(a))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpdSolver::Dense(c) => c.l_dirty().nrows(),
            SpdSolver::Iterative(a) => a.nrows(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch(format!("system of size {n} with rhs {}", b.len())));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        match self {
            SpdSolver::Dense(chol) => Ok(chol.solve(&DVector::from_column_slice(b)).iter().copied().collect()),
            SpdSolver::Iterative(a) => pcg(a, b, 1e-12, 20 * n).map(|o| o.solution),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Singular values of `m`, sorted in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Number of singular values above `rtol · σ_max`.
pub fn rank_from_singular_values(s: &[f64], rtol: f64) -> usize {
    let smax = s.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rtol * smax).count()
}

/// Like [`rank_from_singular_values`] but refuses to count when the smallest retained
/// singular value is within a factor 10 of the threshold.
pub fn rank_with_gap(s: &[f64], rtol: f64) -> Result<usize, LinalgError> {
    let smax = s.iter().fold(0.0f64, |a, &b| a.max(b));
    if smax == 0.0 {
        return Ok(0);
    }
    let threshold = rtol * smax;
    let mut rank = 0;
    for &v in s {
        if v > threshold {
            if v < 10.0 * threshold {
                return Err(LinalgError::AmbiguousRank { value: v, threshold });
            }
            rank += 1;
        }
    }
    Ok(rank)
}

pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    rank_from_singular_values(&singular_values(m), RANK_RTOL)
}

/// Appends zero rows so that a wide matrix becomes square (thin SVD then yields a full `Vᵀ`).
fn pad_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut p = DMatrix::zeros(m.ncols(), m.ncols());
    p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    p
}

/// Orthonormal basis (as columns) of the range of `m`.
pub fn range_basis(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let s = &svd.singular_values;
    let smax = s.iter().fold(0.0f64, |a, &b| a.max(b));
    let cols: Vec<usize> = (0..s.len()).filter(|&i| smax > 0.0 && s[i] > rtol * smax).collect();
    let mut out = DMatrix::zeros(m.nrows(), cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &u.column(i).rows(0, m.nrows()));
    }
    out
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_basis(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = pad_rows(m).svd(false, true);
    let vt = svd.v_t.unwrap();
    let s = &svd.singular_values;
    let smax = s.iter().fold(0.0f64, |a, &b| a.max(b));
    let cols: Vec<usize> = (0..s.len()).filter(|&i| smax == 0.0 || s[i] <= rtol * smax).collect();
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &vt.row(i).transpose());
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`
/// (assumed orthonormal) inside ℝⁿ.
pub fn complement_basis(q: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    null_basis(&q.transpose(), RANK_RTOL)
}

/// Orthogonal projector `Q Qᵀ` onto the span of orthonormal columns.
pub fn projector(q: &DMatrix<f64>) -> DMatrix<f64> {
    q * q.transpose()
}

/// Spectral-norm distance between the orthogonal projectors onto two subspaces.
pub fn subspace_distance(q1: &DMatrix<f64>, q2: &DMatrix<f64>) -> f64 {
    let n = q1.nrows();
    if q1.ncols() == 0 && q2.ncols() == 0 {
        return 0.0;
    }
    let p1 = if q1.ncols() == 0 { DMatrix::zeros(n, n) } else { projector(q1) };
    let p2 = if q2.ncols() == 0 { DMatrix::zeros(n, n) } else { projector(q2) };
    spectral_norm(&(p1 - p2))
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt via SVD range).
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    range_basis(m, 1e-12)
}

/// Least-squares solution of `a x = b` via SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let eps = 1e-13 * svd.singular_values.max();
    svd.solve(b, eps).expect("svd solve with both factors")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &t)
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn pcg_matches_dense_solve() {
        let a = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let cg = pcg(&a, &b, 1e-12, 1000).unwrap();
        let dense = a.to_dense().cholesky().unwrap().solve(&DVector::from_column_slice(&b));
        for i in 0..50 {
            assert!((cg.solution[i] - dense[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn pcg_reports_failure_when_iterations_exhausted() {
        let a = laplacian_1d(200);
        let b = vec![1.0; 200];
        assert!(matches!(pcg(&a, &b, 1e-14, 3), Err(LinalgError::SolverFailure { .. })));
    }

    #[test]
    fn null_and_range_bases_are_complementary() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, 1.0, 2.0, 4.0, 0.0, 2.0]);
        let nb = null_basis(&m, RANK_RTOL);
        assert_eq!(nb.ncols(), 3);
        assert!((&m * &nb).norm() < 1e-12);
        let rb = range_basis(&m, RANK_RTOL);
        assert_eq!(rb.ncols(), 1);
    }

    #[test]
    fn rank_gap_check_rejects_near_threshold_values() {
        assert_eq!(rank_with_gap(&[1.0, 0.5, 1e-14], 1e-8), Ok(2));
        assert!(rank_with_gap(&[1.0, 5e-8], 1e-8).is_err());
    }

    #[test]
    fn subspace_distance_of_equal_spans_is_zero() {
        let q = DMatrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let q2 = DMatrix::from_row_slice(3, 1, &[-1.0, 0.0, 0.0]);
        assert!(subspace_distance(&q, &q2) < 1e-14);
        let q3 = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 0.0]);
        assert!((subspace_distance(&q, &q3) - 1.0).abs() < 1e-12);
    }
}
