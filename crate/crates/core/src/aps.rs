//! Finite-dimensional index calculus: discretized path operators d/dt + L with
//! spectral boundary conditions, commensurate projections, the kernel/cokernel
//! identities for a direct sum of maps, and the cohomological index identity.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, QMatrix};
use crate::linalg::{self, LinalgError};
use crate::spectral::SpectralProjection;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApsError {
    #[error("step too coarse: ‖hL‖ = {0} ≥ 1")]
    StepTooCoarse(f64),
    #[error("ambiguous rank: singular value {value:e} too close to threshold {threshold:e}")]
    DegenerateAlignment { value: f64, threshold: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("example table: {0}")]
    Table(String),
}

impl From<LinalgError> for ApsError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::AmbiguousRank { value, threshold } => ApsError::DegenerateAlignment { value, threshold },
            other => ApsError::Invalid(other.to_string()),
        }
    }
}

/// Backward-Euler discretization of d/dt + L on [0, T] with the boundary
/// condition P x_N = 0.
#[derive(Debug, Clone)]
pub struct BoundaryValueProblem {
    l: DMatrix<f64>,
    horizon: f64,
    steps: usize,
    projection: SpectralProjection,
    assembled: DMatrix<f64>,
}

impl BoundaryValueProblem {
    pub fn new(l: DMatrix<f64>, horizon: f64, steps: usize, projection: SpectralProjection) -> Result<Self, ApsError> {
        let m = l.nrows();
        if l.ncols() != m {
            return Err(ApsError::DimensionMismatch(format!("L is {}x{}", m, l.ncols())));
        }
        if projection.ambient_dim() != m {
            return Err(ApsError::DimensionMismatch(format!("L has size {m}, projection acts on {}", projection.ambient_dim())));
        }
        if !(horizon > 0.0) || steps == 0 {
            return Err(ApsError::Invalid(format!("horizon {horizon} with {steps} steps")));
        }
        let h = horizon / steps as f64;
        let hl = linalg::spectral_norm(&(&l * h));
        if hl >= 1.0 {
            return Err(ApsError::StepTooCoarse(hl));
        }
        let r = projection.rank();
        let mut a = DMatrix::zeros(m * steps + r, m * (steps + 1));
        let inv_h = 1.0 / h;
        for j in 0..steps {
            let row = j * m;
            for i in 0..m {
                a[(row + i, j * m + i)] -= inv_h;
                a[(row + i, (j + 1) * m + i)] += inv_h;
            }
            a.view_mut((row, (j + 1) * m), (m, m)).add_assign(&l);
        }
        let pt = projection.basis().transpose();
        a.view_mut((m * steps, m * steps), (r, m)).copy_from(&pt);
        Ok(BoundaryValueProblem { l, horizon, steps, projection, assembled: a })
    }

    pub fn size(&self) -> usize {
        self.l.nrows()
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn projection(&self) -> &SpectralProjection {
        &self.projection
    }

    pub fn assembled_matrix(&self) -> &DMatrix<f64> {
        &self.assembled
    }

    pub fn with_projection(&self, projection: SpectralProjection) -> Result<Self, ApsError> {
        Self::new(self.l.clone(), self.horizon, self.steps, projection)
    }
}

trait AddAssignView {
    fn add_assign(&mut self, other: &DMatrix<f64>);
}

impl AddAssignView for nalgebra::DMatrixViewMut<'_, f64> {
    fn add_assign(&mut self, other: &DMatrix<f64>) {
        for c in 0..other.ncols() {
            for r in 0..other.nrows() {
                self[(r, c)] += other[(r, c)];
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FredholmReport {
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
    pub singular_values: Vec<f64>,
}

/// Kernel, cokernel and index of a dense map from its singular values, with
/// the relative threshold and gap check.
pub fn fredholm_report(a: &DMatrix<f64>) -> Result<FredholmReport, ApsError> {
    let (rows, cols) = a.shape();
    let s = linalg::singular_values(a);
    let rank = linalg::rank_with_gap(&s, linalg::RANK_RTOL)?;
    let kernel_dim = cols - rank;
    let cokernel_dim = rows - rank;
    Ok(FredholmReport { kernel_dim, cokernel_dim, index: kernel_dim as i64 - cokernel_dim as i64, singular_values: s })
}

pub fn numeric_index(p: &BoundaryValueProblem) -> Result<FredholmReport, ApsError> {
    fredholm_report(p.assembled_matrix())
}

/// Index of P∘P₀ : im P₀ → im P.
pub fn commensurate_index(p: &SpectralProjection, p0: &SpectralProjection) -> Result<i64, ApsError> {
    if p.ambient_dim() != p0.ambient_dim() {
        return Err(ApsError::DimensionMismatch(format!("projections act on {} and {}", p.ambient_dim(), p0.ambient_dim())));
    }
    let map = p.basis().transpose() * p0.basis();
    if map.nrows() == 0 || map.ncols() == 0 {
        return Ok(map.ncols() as i64 - map.nrows() as i64);
    }
    Ok(fredholm_report(&map)?.index)
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexChange {
    pub index_new: i64,
    pub index_base: i64,
    pub projection_index: i64,
    pub holds: bool,
}

/// Ind(D̂ ⊕ P) against Ind(D̂ ⊕ P₀) + Ind(P P₀), each computed separately.
pub fn verify_index_change(p0: &BoundaryValueProblem, p: &SpectralProjection) -> Result<IndexChange, ApsError> {
    let index_base = numeric_index(p0)?.index;
    let index_new = numeric_index(&p0.with_projection(p.clone())?)?.index;
    let projection_index = commensurate_index(p, p0.projection())?;
    Ok(IndexChange { index_new, index_base, projection_index, holds: index_new == index_base + projection_index })
}

#[derive(Debug, Clone, Serialize)]
pub struct SumFredholmReport {
    pub kernel_dim: usize,
    pub restricted_kernel_dim: usize,
    pub kernels_equal: bool,
    pub cokernel_dim: usize,
    pub cokernel_d1: usize,
    pub cokernel_restricted_d2: usize,
}

impl SumFredholmReport {
    pub fn holds(&self) -> bool {
        self.kernels_equal && self.cokernel_dim == self.cokernel_d1 + self.cokernel_restricted_d2
    }
}

/// For D₁ : V → W₁ and D₂ : V → W₂ with D̃ = (D₁, D₂) : V → W₁ ⊕ W₂, checks in exact
/// arithmetic that Ker D̃ = Ker(D₁|Ker D₂) and
/// dim Coker D̃ = dim Coker D₁ + dim Coker(D₂|Ker D₁).
pub fn verify_sum_fredholm(d1: &QMatrix, d2: &QMatrix, domain: usize) -> Result<SumFredholmReport, ApsError> {
    for (name, d) in [("D1", d1), ("D2", d2)] {
        if d.iter().any(|row| row.len() != domain) {
            return Err(ApsError::DimensionMismatch(format!("{name} rows must have length {domain}")));
        }
    }
    let (w1, w2) = (d1.len(), d2.len());
    let total = exact::stack(d1, d2);
    let ker_total = exact::null_space(&total, domain);

    let ker_d2 = exact::null_space(d2, domain);
    let d1_on_k2 = exact::mul_columns(d1, &ker_d2);
    let coeffs = exact::null_space(&d1_on_k2, ker_d2.len());
    let k2 = exact::columns_to_matrix(&ker_d2, domain);
    let restricted: Vec<_> = exact::mul_columns(&k2, &coeffs);
    let restricted_cols: Vec<Vec<_>> = (0..coeffs.len()).map(|c| restricted.iter().map(|row| row[c].clone()).collect()).collect();

    let mut union = ker_total.clone();
    union.extend(restricted_cols.iter().cloned());
    let union_rank = exact::rank(&exact::columns_to_matrix(&union, domain));
    let kernels_equal = union_rank == ker_total.len() && union_rank == restricted_cols.len();

    let rank_total = domain - ker_total.len();
    let ker_d1 = exact::null_space(d1, domain);
    let d2_on_k1 = exact::mul_columns(d2, &ker_d1);
    let rank_restricted = if ker_d1.is_empty() { 0 } else { exact::rank(&d2_on_k1) };
    Ok(SumFredholmReport {
        kernel_dim: ker_total.len(),
        restricted_kernel_dim: restricted_cols.len(),
        kernels_equal,
        cokernel_dim: w1 + w2 - rank_total,
        cokernel_d1: w1 - exact::rank(d1),
        cokernel_restricted_d2: w2 - rank_restricted,
    })
}

/// 2·ind + b₁(X) − b⁺(X) − b₁(Y).
pub fn index_formula(ind_dirac: i64, b1_x: i64, bplus_x: i64, b1_y: i64) -> i64 {
    2 * ind_dirac + b1_x - bplus_x - b1_y
}

/// σ + χ + b₀(Y) + b₁(Y) = 2(b₀(X) − b₁(X) + b⁺(X) + b₁(Y)).
pub fn cohomology_identity_check(sigma: i64, chi: i64, b0_y: i64, b1_y: i64, b0_x: i64, b1_x: i64, bplus_x: i64) -> bool {
    sigma + chi + b0_y + b1_y == 2 * (b0_x - b1_x + bplus_x + b1_y)
}

/// Invariants of a compact oriented 4-manifold X with boundary Y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourManifold {
    pub name: String,
    pub sigma: i64,
    pub chi: i64,
    pub b0_y: i64,
    pub b1_y: i64,
    pub b0_x: i64,
    pub b1_x: i64,
    pub bplus_x: i64,
    pub note: String,
}

impl FourManifold {
    pub fn satisfies_identity(&self) -> bool {
        cohomology_identity_check(self.sigma, self.chi, self.b0_y, self.b1_y, self.b0_x, self.b1_x, self.bplus_x)
    }

    /// The same entry with b⁺ raised by one; never satisfies the identity.
    pub fn perturbed(&self) -> FourManifold {
        FourManifold { name: format!("{} (b+ + 1)", self.name), bplus_x: self.bplus_x + 1, ..self.clone() }
    }
}

const TABLE: &str = include_str!("../data/four_manifolds.json");

pub fn example_table() -> Result<Vec<FourManifold>, ApsError> {
    serde_json::from_str(TABLE).map_err(|e| ApsError::Table(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralModel;

    fn diag(d: &[f64]) -> (DMatrix<f64>, SpectralModel) {
        (DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)), SpectralModel::synthetic_diag(d))
    }

    #[test]
    fn index_counts_positive_modes() {
        let (l, model) = diag(&[1.0, -1.0, 0.0]);
        let p = BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()).unwrap();
        assert_eq!(p.assembled_matrix().shape(), (3 * 32 + 2, 3 * 33));
        let r = numeric_index(&p).unwrap();
        assert_eq!((r.index, r.kernel_dim, r.cokernel_dim), (1, 1, 0));
    }

    #[test]
    fn zero_operator_with_full_condition() {
        let (l, model) = diag(&[0.0, 0.0]);
        let p = BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()).unwrap();
        let r = numeric_index(&p).unwrap();
        assert_eq!((r.index, r.kernel_dim, r.cokernel_dim), (0, 0, 0));
    }

    #[test]
    fn decaying_mode_spans_the_kernel() {
        let (l, model) = diag(&[5.0]);
        let p = BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()).unwrap();
        let r = numeric_index(&p).unwrap();
        assert_eq!((r.index, r.kernel_dim), (1, 1));
    }

    #[test]
    fn coarse_step_is_rejected() {
        let (l, model) = diag(&[50.0]);
        assert!(matches!(BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()), Err(ApsError::StepTooCoarse(_))));
    }

    #[test]
    fn commensurate_examples() {
        let (_, model) = diag(&[-2.0, -1.0, 1.0, 3.0]);
        let p0 = model.projection_onto(&[0, 1]);
        assert_eq!(commensurate_index(&p0, &p0).unwrap(), 0);
        assert_eq!(commensurate_index(&model.projection_onto(&[0, 1, 2]), &p0).unwrap(), -1);
        let big = model.projection_onto(&[0, 1, 2, 3]);
        assert_eq!(commensurate_index(&p0, &big).unwrap(), 2);
    }

    #[test]
    fn index_change_example() {
        let (l, model) = diag(&[1.0, -1.0, 0.0]);
        let p0 = BoundaryValueProblem::new(l, 1.0, 32, model.nonpositive_projection()).unwrap();
        let p = model.projection_onto(&[0, 1, 2]);
        let r = verify_index_change(&p0, &p).unwrap();
        assert_eq!((r.index_new, r.index_base, r.projection_index), (0, 1, -1));
        assert!(r.holds);
    }

    #[test]
    fn sum_fredholm_trivial_cases() {
        let id = exact::from_i64(&[vec![1, 0], vec![0, 1]]);
        let zero = exact::from_i64(&[vec![0, 0], vec![0, 0], vec![0, 0]]);
        let r = verify_sum_fredholm(&id, &zero, 2).unwrap();
        assert!(r.holds());
        assert_eq!((r.kernel_dim, r.cokernel_dim), (0, 3));
        let r = verify_sum_fredholm(&zero, &id, 2).unwrap();
        assert!(r.holds());
        assert_eq!((r.kernel_dim, r.cokernel_dim), (0, 3));
    }

    #[test]
    fn formula_arithmetic() {
        assert_eq!(index_formula(0, 0, 0, 0), 0);
        assert_eq!(index_formula(1, 0, 2, 0), 0);
        assert_eq!(index_formula(0, 3, 1, 2), 0);
        assert_eq!(index_formula(2, 0, 0, 0), 4);
    }

    #[test]
    fn identity_examples() {
        assert!(cohomology_identity_check(0, 1, 1, 0, 1, 0, 0));
        assert!(cohomology_identity_check(0, 2, 1, 1, 1, 0, 0));
        assert!(!cohomology_identity_check(0, 1, 1, 0, 1, 0, 1));
    }

    #[test]
    fn bundled_table() {
        let t = example_table().unwrap();
        assert!(t.len() >= 4);
        for e in &t {
            assert!(e.satisfies_identity(), "{}", e.name);
            assert!(!e.perturbed().satisfies_identity(), "{}", e.name);
        }
    }
}
