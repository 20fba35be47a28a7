//! Decomposition of 1-cochains on a complex with boundary into a part satisfying
//! the double Coulomb conditions plus an exact part:
//!
//! * (a) ω is coclosed at every interior vertex,
//! * (b) the tangential trace of ω is coclosed on the boundary complex,
//! * (c) ⟨d e_i, ω⟩ = 0 for the boundary-locally-constant harmonic functions e_i.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::dec::{Cochain, Dec, DecError, InnerProductStructure};
use crate::linalg::{self, CsrMatrix, LinalgError, SpdSolver};
use crate::mesh::{BoundaryComplex, MeshError, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoulombError {
    #[error("complex has empty boundary")]
    EmptyBoundary,
    #[error("linear solve failed: {0}")]
    SolverFailure(#[from] LinalgError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error(transparent)]
    Mesh(MeshError),
    #[error("expected a 1-cochain, got degree {0}")]
    NotOneForm(usize),
}

impl From<MeshError> for CoulombError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::EmptyBoundary => CoulombError::EmptyBoundary,
            other => CoulombError::Mesh(other),
        }
    }
}

/// Harmonic functions e_i with trace equal to the indicator of boundary
/// component N_i, and their flux matrix ⟨d e_i, d e_j⟩.
#[derive(Debug, Clone)]
pub struct HarmonicBoundarySpace {
    pub basis: Vec<Cochain>,
    pub ev_matrix: DMatrix<f64>,
    /// ‖(d*d e_i) at interior vertices‖ for each basis element.
    pub dirichlet_residuals: Vec<f64>,
    /// Reference magnitude for rank decisions: the largest stiffness entry.
    pub scale: f64,
}

impl HarmonicBoundarySpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn rank_threshold(&self) -> f64 {
        let smax = linalg::singular_values(&self.ev_matrix).first().copied().unwrap_or(0.0);
        linalg::RANK_RTOL * smax.max(self.scale)
    }

    pub fn ev_rank(&self) -> usize {
        let t = self.rank_threshold();
        linalg::singular_values(&self.ev_matrix).iter().filter(|&&s| s > t).count()
    }

    /// Orthonormal basis of the numerical kernel of the ev matrix.
    pub fn ev_kernel(&self) -> DMatrix<f64> {
        let t = self.rank_threshold();
        let eig = self.ev_matrix.clone().symmetric_eigen();
        let cols: Vec<usize> = (0..self.dim()).filter(|&i| eig.eigenvalues[i].abs() <= t).collect();
        DMatrix::from_fn(self.dim(), cols.len(), |r, c| eig.eigenvectors[(r, cols[c])])
    }
}

/// Residuals of the three conditions and of the reconstruction α = ω + dξ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CcResiduals {
    pub interior: f64,
    pub boundary: f64,
    pub flux: f64,
    pub reconstruction: f64,
}

impl CcResiduals {
    pub fn max(&self) -> f64 {
        self.interior.max(self.boundary).max(self.flux).max(self.reconstruction)
    }
}

#[derive(Debug, Clone)]
pub struct CcDecomposition {
    pub omega: Cochain,
    pub xi: Cochain,
    pub residuals: CcResiduals,
}

/// Precomputed operators for decomposing 1-cochains on one complex.
#[derive(Debug, Clone)]
pub struct DoubleCoulomb<'a> {
    dec: Dec<'a>,
    boundary: BoundaryComplex,
    bd_d0: CsrMatrix,
    bd_w0: Vec<f64>,
    bd_w1: Vec<f64>,
    interior: Vec<usize>,
    is_boundary: Vec<bool>,
    interior_solver: SpdSolver,
    l_ib: CsrMatrix,
    bd_free: Vec<usize>,
    bd_solver: SpdSolver,
    harmonic: HarmonicBoundarySpace,
}

impl<'a> DoubleCoulomb<'a> {
    pub fn new(complex: &'a SimplicialComplex) -> Result<Self, CoulombError> {
        Self::with_dec(Dec::new(complex))
    }

    pub fn with_dec(dec: Dec<'a>) -> Result<Self, CoulombError> {
        let m = dec.complex();
        let boundary = m.boundary_complex()?;
        let bc = boundary.complex();
        let nb = bc.vertex_count();
        let bstar = InnerProductStructure::for_complex(bc);
        let (bd_d0, bd_w1) = if bc.dim() >= 1 {
            (bc.coboundary_matrix(0), bstar.weights(1).to_vec())
        } else {
            (CsrMatrix::zeros(0, nb), Vec::new())
        };
        let bd_w0 = bstar.weights(0).to_vec();

        let mut is_boundary = vec![false; m.vertex_count()];
        for &v in boundary.vertex_map() {
            is_boundary[v] = true;
        }
        let interior: Vec<usize> = (0..m.vertex_count()).filter(|&v| !is_boundary[v]).collect();
        let stiffness = dec.stiffness(0);
        let interior_solver = SpdSolver::new(stiffness.submatrix(&interior, &interior))?;
        let l_ib = stiffness.submatrix(&interior, boundary.vertex_map());

        // pin the first vertex of every boundary component
        let mut pinned = vec![false; boundary.component_count()];
        let bd_free: Vec<usize> = (0..nb)
            .filter(|&v| {
                let c = boundary.vertex_component()[v];
                if pinned[c] {
                    true
                } else {
                    pinned[c] = true;
                    false
                }
            })
            .collect();
        let bd_lap = bd_d0.transpose().matmul(&bd_d0.scale(Some(&bd_w1), None));
        let bd_solver = SpdSolver::new(bd_lap.submatrix(&bd_free, &bd_free))?;

        let mut dc = DoubleCoulomb {
            dec,
            boundary,
            bd_d0,
            bd_w0,
            bd_w1,
            interior,
            is_boundary,
            interior_solver,
            l_ib,
            bd_free,
            bd_solver,
            harmonic: HarmonicBoundarySpace { basis: Vec::new(), ev_matrix: DMatrix::zeros(0, 0), dirichlet_residuals: Vec::new(), scale: 0.0 },
        };
        dc.harmonic = dc.build_harmonic(&stiffness)?;
        Ok(dc)
    }

    pub fn dec(&self) -> &Dec<'a> {
        &self.dec
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.dec.complex()
    }

    pub fn boundary(&self) -> &BoundaryComplex {
        &self.boundary
    }

    pub fn harmonic_space(&self) -> &HarmonicBoundarySpace {
        &self.harmonic
    }

    pub fn interior_vertices(&self) -> &[usize] {
        &self.interior
    }

    /// Harmonic extension of boundary values `trace` (indexed like the boundary vertices).
    fn harmonic_extension(&self, trace: &[f64], interior_rhs: Option<&[f64]>) -> Result<Vec<f64>, CoulombError> {
        let m = self.complex();
        let coupling = self.l_ib.mul_vec(trace);
        let rhs: Vec<f64> = match interior_rhs {
            Some(r) => r.iter().zip(&coupling).map(|(a, b)| a - b).collect(),
            None => coupling.iter().map(|b| -b).collect(),
        };
        let xi_i = self.interior_solver.solve(&rhs)?;
        let mut xi = vec![0.0; m.vertex_count()];
        for (&v, &x) in self.interior.iter().zip(&xi_i) {
            xi[v] = x;
        }
        for (&v, &x) in self.boundary.vertex_map().iter().zip(trace) {
            xi[v] = x;
        }
        Ok(xi)
    }

    fn build_harmonic(&self, stiffness: &CsrMatrix) -> Result<HarmonicBoundarySpace, CoulombError> {
        let m = self.complex();
        let b0 = self.boundary.component_count();
        let mut basis = Vec::with_capacity(b0);
        let mut dirichlet_residuals = Vec::with_capacity(b0);
        for i in 0..b0 {
            let trace: Vec<f64> = self.boundary.vertex_component().iter().map(|&c| if c == i { 1.0 } else { 0.0 }).collect();
            let e = self.harmonic_extension(&trace, None)?;
            let le = stiffness.mul_vec(&e);
            dirichlet_residuals.push(linalg::norm(&self.interior.iter().map(|&v| le[v]).collect::<Vec<_>>()));
            basis.push(Cochain::new(m, 0, e)?);
        }
        let de: Vec<Vec<f64>> = basis.iter().map(|e| self.dec.d(0).mul_vec(&e.values)).collect();
        let w1 = self.dec.weights(1);
        let ev_matrix = DMatrix::from_fn(b0, b0, |i, j| crate::dec::weighted_dot(w1, &de[i], &de[j]));
        Ok(HarmonicBoundarySpace { basis, ev_matrix, dirichlet_residuals, scale: stiffness.max_abs() })
    }

    /// G_∂ d*_∂ applied to a boundary 1-cochain: the boundary potential whose
    /// boundary derivative matches the coexact part, mean zero per component.
    fn boundary_potential(&self, trace1: &[f64]) -> Result<Vec<f64>, CoulombError> {
        let nb = self.boundary.complex().vertex_count();
        let weighted: Vec<f64> = trace1.iter().zip(&self.bd_w1).map(|(a, w)| a * w).collect();
        let g = self.bd_d0.tr_mul_vec(&weighted);
        let g_free: Vec<f64> = self.bd_free.iter().map(|&v| g[v]).collect();
        let x_free = self.bd_solver.solve(&g_free)?;
        let mut x = vec![0.0; nb];
        for (&v, &val) in self.bd_free.iter().zip(&x_free) {
            x[v] = val;
        }
        let k = self.boundary.component_count();
        let mut mass = vec![0.0; k];
        let mut moment = vec![0.0; k];
        for v in 0..nb {
            let c = self.boundary.vertex_component()[v];
            mass[c] += self.bd_w0[v];
            moment[c] += self.bd_w0[v] * x[v];
        }
        for v in 0..nb {
            let c = self.boundary.vertex_component()[v];
            x[v] -= moment[c] / mass[c];
        }
        Ok(x)
    }

    fn check_one_form(&self, alpha: &Cochain) -> Result<(), CoulombError> {
        if alpha.degree != 1 {
            return Err(CoulombError::NotOneForm(alpha.degree));
        }
        let expected = self.complex().count(1);
        if alpha.values.len() != expected {
            return Err(DecError::LengthMismatch { expected, found: alpha.values.len() }.into());
        }
        Ok(())
    }

    /// Splits α = ω + dξ with ω satisfying (a), (b), (c) and ξ of ⋆₀-weighted mean zero.
    pub fn decompose(&self, alpha: &Cochain) -> Result<CcDecomposition, CoulombError> {
        self.check_one_form(alpha)?;
        let m = self.complex();
        let d0 = self.dec.d(0);
        let a = &alpha.values;

        // stage 1: Dirichlet problem with boundary value G_∂ d*_∂ 𝐭α
        let trace: Vec<f64> = self.boundary_edges().iter().map(|&e| a[e]).collect();
        let xi_b = self.boundary_potential(&trace)?;
        let div = self.dec.weak_codifferential(0, a);
        let div_i: Vec<f64> = self.interior.iter().map(|&v| div[v]).collect();
        let xi1 = self.harmonic_extension(&xi_b, Some(&div_i))?;
        let dxi1 = d0.mul_vec(&xi1);
        let omega1: Vec<f64> = a.iter().zip(&dxi1).map(|(x, y)| x - y).collect();

        // stage 2: cancel boundary fluxes with ξ₂ ∈ K₀
        let flux = self.fluxes(&omega1);
        let c = self.solve_ev(&flux);
        let mut xi: Vec<f64> = xi1;
        for (ci, e) in c.iter().zip(&self.harmonic.basis) {
            for (x, ev) in xi.iter_mut().zip(&e.values) {
                *x += ci * ev;
            }
        }
        let w0 = self.dec.weights(0);
        let mean = w0.iter().zip(&xi).map(|(w, x)| w * x).sum::<f64>() / w0.iter().sum::<f64>();
        xi.iter_mut().for_each(|x| *x -= mean);
        let dxi = d0.mul_vec(&xi);
        let omega_vals: Vec<f64> = a.iter().zip(&dxi).map(|(x, y)| x - y).collect();

        let omega = Cochain::new(m, 1, omega_vals)?;
        let xi = Cochain::new(m, 0, xi)?;
        let mut residuals = self.residuals(&omega.values);
        let recon: Vec<f64> = a.iter().zip(&omega.values).zip(&dxi).map(|((a, o), d)| a - o - d).collect();
        residuals.reconstruction = linalg::norm(&recon);
        Ok(CcDecomposition { omega, xi, residuals })
    }

    fn boundary_edges(&self) -> &[usize] {
        if self.boundary.complex().dim() >= 1 {
            self.boundary.simplex_map(1)
        } else {
            &[]
        }
    }

    /// ⟨d e_i, ω⟩ for every harmonic basis element.
    pub fn fluxes(&self, omega: &[f64]) -> Vec<f64> {
        let div = self.dec.weak_codifferential(0, omega);
        self.harmonic.basis.iter().map(|e| linalg::dot(&e.values, &div)).collect()
    }

    /// Solves ev·c = f on the hyperplane Σc = 0.
    fn solve_ev(&self, flux: &[f64]) -> Vec<f64> {
        let b = flux.len();
        if b == 0 {
            return Vec::new();
        }
        let shifted = &self.harmonic.ev_matrix + DMatrix::from_element(b, b, 1.0 / b as f64);
        let rhs = DVector::from_column_slice(flux);
        match shifted.clone().cholesky() {
            Some(ch) => ch.solve(&rhs).iter().copied().collect(),
            None => linalg::lstsq(&shifted, &rhs).iter().copied().collect(),
        }
    }

    fn residuals(&self, omega: &[f64]) -> CcResiduals {
        let div = self.dec.weak_codifferential(0, omega);
        let interior = linalg::norm(&self.interior.iter().map(|&v| div[v]).collect::<Vec<_>>());
        let trace: Vec<f64> = self.boundary_edges().iter().zip(&self.bd_w1).map(|(&e, w)| omega[e] * w).collect();
        let boundary = linalg::norm(&self.bd_d0.tr_mul_vec(&trace));
        let flux = self.fluxes(omega).iter().fold(0.0f64, |acc, f| acc.max(f.abs()));
        CcResiduals { interior, boundary, flux, reconstruction: 0.0 }
    }

    /// Residuals of conditions (a), (b), (c) for an arbitrary 1-cochain.
    pub fn verify_cc(&self, omega: &Cochain) -> Result<CcResiduals, CoulombError> {
        self.check_one_form(omega)?;
        Ok(self.residuals(&omega.values))
    }

    /// Rows of the linear conditions (a), (b), (c) acting on 1-cochains.
    pub fn constraint_matrix(&self) -> DMatrix<f64> {
        let m = self.complex();
        let ne = m.count(1);
        let w1 = self.dec.weights(1);
        let d0 = self.dec.d(0);
        let nrows = self.interior.len() + self.boundary.complex().vertex_count() + self.harmonic.dim();
        let mut c = DMatrix::zeros(nrows, ne);
        // (a): rows of d0ᵀW1 at interior vertices
        let mut row_of = vec![usize::MAX; m.vertex_count()];
        for (r, &v) in self.interior.iter().enumerate() {
            row_of[v] = r;
        }
        for (e, (v, s)) in d0.triplets().into_iter().map(|(e, v, s)| (e, (v, s))) {
            if !self.is_boundary[v] {
                c[(row_of[v], e)] += s * w1[e];
            }
        }
        // (b): d_∂ᵀ W1_∂ 𝐭
        let off = self.interior.len();
        let bedges = self.boundary_edges();
        for (be, bv, s) in self.bd_d0.triplets() {
            c[(off + bv, bedges[be])] += s * self.bd_w1[be];
        }
        // (c): (d e_i)ᵀ W1
        let off = off + self.boundary.complex().vertex_count();
        for (i, e) in self.harmonic.basis.iter().enumerate() {
            let de = d0.mul_vec(&e.values);
            for j in 0..ne {
                c[(off + i, j)] = de[j] * w1[j];
            }
        }
        c
    }

    /// Numerical rank of [`DoubleCoulomb::constraint_matrix`].
    pub fn constraint_rank(&self) -> usize {
        linalg::numerical_rank(&self.constraint_matrix())
    }

    /// Solves the characterization system C(α − dξ) = 0 with ⋆₀-mean-zero ξ
    /// by dense least squares, independently of the staged procedure.
    pub fn characterization_solve(&self, alpha: &Cochain) -> Result<CcDecomposition, CoulombError> {
        self.check_one_form(alpha)?;
        let m = self.complex();
        let c = self.constraint_matrix();
        let d0 = self.dec.d(0).to_dense();
        let w0 = self.dec.weights(0);
        let nv = m.vertex_count();
        let cd = &c * &d0;
        let mut sys = DMatrix::zeros(cd.nrows() + 1, nv);
        sys.view_mut((0, 0), (cd.nrows(), nv)).copy_from(&cd);
        let total: f64 = w0.iter().sum();
        for v in 0..nv {
            sys[(cd.nrows(), v)] = w0[v] / total;
        }
        let a = DVector::from_column_slice(&alpha.values);
        let ca = &c * &a;
        let mut rhs = DVector::zeros(cd.nrows() + 1);
        rhs.rows_mut(0, cd.nrows()).copy_from(&ca);
        let xi = linalg::lstsq(&sys, &rhs);
        let dxi = &d0 * &xi;
        let omega_vals: Vec<f64> = (&a - &dxi).iter().copied().collect();
        let residuals = self.residuals(&omega_vals);
        Ok(CcDecomposition {
            omega: Cochain::new(m, 1, omega_vals)?,
            xi: Cochain::new(m, 0, xi.iter().copied().collect())?,
            residuals,
        })
    }
}
