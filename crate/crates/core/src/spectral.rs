//! Symmetric operators with sorted eigen-decompositions, spectral projections
//! onto eigen-intervals, the first-order model on closed 3-complexes and the
//! block operator check for L₁.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::dec::InnerProductStructure;
use crate::linalg::{self, CsrMatrix};
use crate::mesh::SimplicialComplex;

/// Largest operator handled by the dense eigen-solver.
pub const MAX_DENSE_EIGEN: usize = 3000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("complex has nonempty boundary")]
    NotClosed,
    #[error("complex has dimension {0}, expected 3")]
    NotDim3(usize),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("operator of size {0} exceeds the dense eigen-solver limit")]
    TooLarge(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty spectral subspace for interval {0}")]
    EmptySubspace(Interval),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Synthetic,
    CurlOfClosed3Mesh,
}

/// Half-open spectral window (lower, upper]; a missing bound is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Interval { lower: Some(lower), upper: Some(upper) }
    }

    pub fn below(upper: f64) -> Self {
        Interval { lower: None, upper: Some(upper) }
    }

    pub fn all() -> Self {
        Interval { lower: None, upper: None }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower.map_or(true, |l| x > l) && self.upper.map_or(true, |u| x <= u)
    }

    /// Whether `self` ⊆ `other` as sets of reals.
    pub fn is_within(&self, other: &Interval) -> bool {
        let lower_ok = match (self.lower, other.lower) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a >= b,
        };
        let upper_ok = match (self.upper, other.upper) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        };
        lower_ok && upper_ok
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.lower {
            Some(l) => write!(f, "({l}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match self.upper {
            Some(u) => write!(f, "{u}]"),
            None => write!(f, "inf)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralModel {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    provenance: Provenance,
}

impl SpectralModel {
    pub fn from_symmetric(matrix: DMatrix<f64>, provenance: Provenance) -> Result<Self, SpectralError> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(SpectralError::DimensionMismatch(format!("{}x{} is not square", n, matrix.ncols())));
        }
        if n > MAX_DENSE_EIGEN {
            return Err(SpectralError::TooLarge(n));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(SpectralError::NotSymmetric(asym));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let eig = sym_eigen(sym.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(SpectralModel { matrix: sym, eigenvalues, eigenvectors, provenance })
    }

    /// A diagonal model whose eigenvalues are exactly `diag`, sorted.
    pub fn synthetic_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| if r == order[c] { 1.0 } else { 0.0 });
        SpectralModel {
            matrix: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
            eigenvalues: order.iter().map(|&i| diag[i]).collect(),
            eigenvectors,
            provenance: Provenance::Synthetic,
        }
    }

    /// k·D for k > 0, keeping the eigenbasis.
    pub fn scaled(&self, k: f64) -> Self {
        SpectralModel {
            matrix: &self.matrix * k,
            eigenvalues: self.eigenvalues.iter().map(|l| l * k).collect(),
            eigenvectors: self.eigenvectors.clone(),
            provenance: self.provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`SpectralModel::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Tolerance under which an eigenvalue counts as zero.
    pub fn zero_tolerance(&self) -> f64 {
        let scale = self.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        1e-9 * scale.max(1.0)
    }

    /// Largest eigen-residual ‖A v − λ v‖ and orthogonality defect ‖VᵀV − I‖.
    pub fn eigen_residuals(&self) -> (f64, f64) {
        let mut worst = 0.0f64;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(i);
            worst = worst.max((&self.matrix * v - v * l).norm());
        }
        let n = self.dim();
        let orth = (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::identity(n, n)).amax();
        (worst, orth)
    }

    pub fn count_in(&self, interval: &Interval) -> usize {
        self.eigenvalues.iter().filter(|&&l| interval.contains(l)).count()
    }

    pub fn projection(&self, interval: Interval) -> SpectralProjection {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| interval.contains(self.eigenvalues[i])).collect();
        let basis = DMatrix::from_fn(self.dim(), idx.len(), |r, c| self.eigenvectors[(r, idx[c])]);
        SpectralProjection { basis, interval: Some(interval), indices: Some(idx) }
    }

    /// Projection onto eigenvalues ≤ 0, zero taken up to [`SpectralModel::zero_tolerance`].
    pub fn nonpositive_projection(&self) -> SpectralProjection {
        let mut p = self.projection(Interval::below(self.zero_tolerance()));
        p.interval = Some(Interval::below(0.0));
        p
    }

    /// Projection onto the span of the listed eigenvectors.
    pub fn projection_onto(&self, indices: &[usize]) -> SpectralProjection {
        let basis = DMatrix::from_fn(self.dim(), indices.len(), |r, c| self.eigenvectors[(r, indices[c])]);
        SpectralProjection { basis, interval: None, indices: Some(indices.to_vec()) }
    }
}

/// Orthogonal projection, stored through an orthonormal basis of its image.
#[derive(Debug, Clone)]
pub struct SpectralProjection {
    basis: DMatrix<f64>,
    interval: Option<Interval>,
    indices: Option<Vec<usize>>,
}

impl SpectralProjection {
    /// Projection onto the column span of `m` (orthonormalized).
    pub fn from_span(m: &DMatrix<f64>) -> Self {
        SpectralProjection { basis: linalg::range_basis(m, linalg::RANK_RTOL), interval: None, indices: None }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn interval(&self) -> Option<Interval> {
        self.interval
    }

    /// Eigen-indices spanning the image, when built from a model.
    pub fn indices(&self) -> Option<&[usize]> {
        self.indices.as_deref()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }
}

/// Operator norm of D·π − π·D.
pub fn commutator_norm(model: &SpectralModel, proj: &SpectralProjection) -> Result<f64, SpectralError> {
    if proj.ambient_dim() != model.dim() {
        return Err(SpectralError::DimensionMismatch(format!("operator {} vs projection {}", model.dim(), proj.ambient_dim())));
    }
    let p = proj.matrix();
    let c = model.matrix() * &p - &p * model.matrix();
    Ok(linalg::spectral_norm(&c))
}

/// Symmetric eigen-decomposition that also accepts the empty matrix.
fn sym_eigen(m: DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    if m.nrows() == 0 {
        return SymmetricEigen { eigenvectors: DMatrix::zeros(0, 0), eigenvalues: DVector::zeros(0) };
    }
    SymmetricEigen::new(m)
}

/// W^{1/2} d W^{-1/2}: a coboundary in orthonormal coordinates of the stars.
fn weighted(d: &CsrMatrix, w_from: &[f64], w_to: &[f64]) -> DMatrix<f64> {
    let left: Vec<f64> = w_to.iter().map(|w| w.sqrt()).collect();
    let right: Vec<f64> = w_from.iter().map(|w| 1.0 / w.sqrt()).collect();
    d.scale(Some(&left), Some(&right)).to_dense()
}

/// First-order model on a closed 3-complex: the symmetric block operator
/// [[0, d₁*], [d₁, 0]] acting on coclosed 1-cochains ⊕ exact 2-cochains, written in
/// orthonormal coordinates of the Hodge stars. Its kernel is the space of
/// harmonic 1-cochains and its spectrum is symmetric about 0.
pub fn build_curl_model(y: &SimplicialComplex) -> Result<SpectralModel, SpectralError> {
    if y.dim() != 3 {
        return Err(SpectralError::NotDim3(y.dim()));
    }
    if !y.is_closed() {
        return Err(SpectralError::NotClosed);
    }
    let star = InnerProductStructure::for_complex(y);
    let d0 = weighted(&y.coboundary_matrix(0), star.weights(0), star.weights(1));
    let d1 = weighted(&y.coboundary_matrix(1), star.weights(1), star.weights(2));
    let coclosed = linalg::null_basis(&d0.transpose(), linalg::RANK_RTOL);
    let exact2 = linalg::range_basis(&d1, linalg::RANK_RTOL);
    let a = exact2.transpose() * &d1 * &coclosed;
    let (r2, r1) = a.shape();
    let n = r1 + r2;
    if n > MAX_DENSE_EIGEN {
        return Err(SpectralError::TooLarge(n));
    }
    let mut t = DMatrix::zeros(n, n);
    t.view_mut((0, r1), (r1, r2)).copy_from(&a.transpose());
    t.view_mut((r1, 0), (r2, r1)).copy_from(&a);
    SpectralModel::from_symmetric(t, Provenance::CurlOfClosed3Mesh)
}

/// Outcome of the L₁ block-operator check.
#[derive(Debug, Clone, Serialize)]
pub struct L1Report {
    pub image_dim: usize,
    pub vertex_count: usize,
    pub nonpositive_dim: usize,
    pub constructed_dim: usize,
    pub residual: f64,
}

/// L₁ check on a closed complex with its own Hodge stars.
pub fn l1_negative_graph_check(m: &SimplicialComplex) -> Result<L1Report, SpectralError> {
    if !m.is_closed() {
        return Err(SpectralError::NotClosed);
    }
    let star = InnerProductStructure::for_complex(m);
    l1_graph_check(&m.coboundary_matrix(0), star.weights(0), star.weights(1))
}

/// L₁ = [[0, −d], [−d*, 0]] on (im d) ⊕ C⁰ for a coboundary `d` : C⁰ → C¹ with
/// diagonal weights: compares its nonpositive eigenspace with the graph
/// {(b, d*(dd*)^{-1/2} b)} plus the constants.
pub fn l1_graph_check(d: &CsrMatrix, w0: &[f64], w1: &[f64]) -> Result<L1Report, SpectralError> {
    let nv = d.ncols();
    if w0.len() != nv || w1.len() != d.nrows() {
        return Err(SpectralError::DimensionMismatch(format!("d is {}x{}, weights {} and {}", d.nrows(), nv, w0.len(), w1.len())));
    }
    let dt = weighted(d, w0, w1);
    let q = linalg::range_basis(&dt, linalg::RANK_RTOL);
    let r = q.ncols();
    let b = -(q.transpose() * &dt);
    let n = r + nv;
    let mut l1 = DMatrix::zeros(n, n);
    l1.view_mut((0, r), (r, nv)).copy_from(&b);
    l1.view_mut((r, 0), (nv, r)).copy_from(&b.transpose());
    let model = SpectralModel::from_symmetric(l1, Provenance::Synthetic)?;
    let direct = model.nonpositive_projection();

    // graph of y ↦ d̃ᵀ Q S^{-1/2} y with S = Qᵀ d̃ d̃ᵀ Q, plus the weighted constants
    let s = q.transpose() * &dt * dt.transpose() * &q;
    let eig = sym_eigen(s);
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt()))
        * eig.eigenvectors.transpose();
    let lower = dt.transpose() * &q * inv_sqrt;
    let mut constructed = DMatrix::zeros(n, r + 1);
    for i in 0..r {
        constructed[(i, i)] = 1.0;
    }
    constructed.view_mut((r, 0), (nv, r)).copy_from(&lower);
    for v in 0..nv {
        constructed[(r + v, r)] = w0[v].sqrt();
    }
    let constructed = linalg::orthonormalize(&constructed);
    let residual = linalg::subspace_distance(direct.basis(), &constructed);
    Ok(L1Report { image_dim: r, vertex_count: nv, nonpositive_dim: direct.rank(), constructed_dim: constructed.ncols(), residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, parse_generator};

    #[test]
    fn synthetic_eigenvalues_are_verbatim() {
        let m = SpectralModel::synthetic_diag(&[-3.0, -1.0, -0.2, 0.4, 2.0]);
        assert_eq!(m.eigenvalues(), &[-3.0, -1.0, -0.2, 0.4, 2.0]);
        let m = SpectralModel::from_symmetric(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -3.0, 0.4])), Provenance::Synthetic).unwrap();
        assert_eq!(m.eigenvalues(), &[-3.0, 0.4, 2.0]);
    }

    #[test]
    fn nonpositive_ranks() {
        assert_eq!(SpectralModel::synthetic_diag(&[1.0, -1.0, 0.0]).nonpositive_projection().rank(), 2);
        let p = SpectralModel::synthetic_diag(&[2.0, 3.0]).nonpositive_projection();
        assert_eq!(p.rank(), 0);
        assert_eq!(p.matrix().amax(), 0.0);
    }

    #[test]
    fn interval_endpoints() {
        let i = Interval::new(-1.0, 1.0);
        assert!(!i.contains(-1.0));
        assert!(i.contains(1.0));
        assert!(Interval::new(-0.5, 0.5).is_within(&i));
        assert!(!Interval::below(0.5).is_within(&i));
        assert!(i.is_within(&Interval::all()));
    }

    #[test]
    fn commutator_of_coordinate_projection() {
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let m = SpectralModel::from_symmetric(d, Provenance::Synthetic).unwrap();
        let p = SpectralProjection::from_span(&DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        assert!((commutator_norm(&m, &p).unwrap() - 1.0).abs() < 1e-12);
        let full = m.projection(Interval::all());
        assert!(commutator_norm(&m, &full).unwrap() < 1e-12);
        let bad = SpectralProjection::from_span(&DMatrix::identity(3, 3));
        assert!(matches!(commutator_norm(&m, &bad), Err(SpectralError::DimensionMismatch(_))));
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let d = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(SpectralModel::from_symmetric(d, Provenance::Synthetic), Err(SpectralError::NotSymmetric(_))));
    }

    #[test]
    fn curl_model_preconditions() {
        let disk = generate(&parse_generator("disk:2").unwrap()).unwrap();
        assert_eq!(build_curl_model(&disk).unwrap_err(), SpectralError::NotDim3(2));
        let st = generate(&parse_generator("solid-torus:3").unwrap()).unwrap();
        assert_eq!(build_curl_model(&st).unwrap_err(), SpectralError::NotClosed);
    }

    #[test]
    fn single_point_has_only_constants() {
        let d = CsrMatrix::zeros(0, 1);
        let r = l1_graph_check(&d, &[1.0], &[]).unwrap();
        assert_eq!(r.image_dim, 0);
        assert_eq!(r.nonpositive_dim, 1);
        assert!(r.residual < 1e-12);
    }
}
