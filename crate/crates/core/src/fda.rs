//! Finite-dimensional approximation of flows ẏ = −F(y) with F = D + Q: spectral
//! compression to eigen-windows, persistence of isolating balls and
//! desuspension-normalised Conley indices across levels.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::conley::{build_index_pair, is_isolating, outer_approximation, CellSet, ConleyError, Grid, VectorField};
use crate::conley::sets::isolation_witnesses;
use crate::spectral::{commutator_norm, Interval, SpectralError, SpectralModel};

#[derive(Debug, Error)]
pub enum FdaError {
    #[error("step {h} too coarse: h times the Lipschitz bound is {product} (needs < 0.5)")]
    StepTooCoarse { h: f64, product: f64 },
    #[error("trajectory blew up at step {0}")]
    Blowup(usize),
    #[error("no eigenvalues in {0}")]
    EmptySubspace(Interval),
    #[error("compressed space of dimension {0} exceeds the grid limit of 3")]
    TooManyDimensions(usize),
    #[error("ball is not isolating{}: {} witness(es)", level.map(|l| format!(" at level {l}")).unwrap_or_default(), witnesses.len())]
    NeverIsolating { level: Option<usize>, witnesses: Vec<Vec<f64>> },
    #[error("shifted indices differ between levels {first} and {second}")]
    StabilizationFailure { first: usize, second: usize },
    #[error("invalid field: {0}")]
    Invalid(String),
    #[error("cannot parse levels: {0}")]
    Levels(String),
    #[error(transparent)]
    Conley(#[from] ConleyError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Polynomial Σ cₖ tᵏ.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    /// Bound on sup |p| over [−a, a].
    pub fn sup_bound(&self, a: f64) -> f64 {
        self.0.iter().enumerate().map(|(k, c)| c.abs() * a.powi(k as i32)).sum()
    }
}

/// Cutoff χ(s): 1 for s ≤ 1, 0 for s ≥ 2, smoothstep in between. Returns (χ, χ′).
fn cutoff(s: f64) -> (f64, f64) {
    if s <= 1.0 {
        (1.0, 0.0)
    } else if s >= 2.0 {
        (0.0, 0.0)
    } else {
        let u = s - 1.0;
        (1.0 - u * u * (3.0 - 2.0 * u), -6.0 * u * (1.0 - u))
    }
}

const CUTOFF_D1: f64 = 1.5;
const CUTOFF_D2: f64 = 6.0;

/// F(x) = ∇(½ xᵀDx + χ(|x|/ρ) ϕ(x)) with ϕ(x) = Σᵢ pᵢ(zᵢ), z the coordinates
/// of x in the eigenbasis of D.
#[derive(Debug, Clone)]
pub struct FlowField {
    model: SpectralModel,
    polys: Vec<Polynomial>,
    rho: f64,
}

impl FlowField {
    /// `polys[i]` acts on the i-th eigen-coordinate (eigenvalues ascending).
    pub fn new(model: SpectralModel, polys: Vec<Polynomial>, rho: f64) -> Result<Self, FdaError> {
        if polys.len() != model.dim() {
            return Err(FdaError::Invalid(format!("{} polynomials for dimension {}", polys.len(), model.dim())));
        }
        if !(rho > 0.0) {
            return Err(FdaError::Invalid("cutoff radius must be positive".into()));
        }
        Ok(FlowField { model, polys, rho })
    }

    /// Diagonal D with polynomials given per standard coordinate.
    pub fn diagonal(diag: &[f64], coordinate_polys: Vec<Polynomial>, rho: f64) -> Result<Self, FdaError> {
        let model = SpectralModel::synthetic_diag(diag);
        if coordinate_polys.len() != diag.len() {
            return Err(FdaError::Invalid("one polynomial per coordinate required".into()));
        }
        let v = model.eigenvectors();
        let polys = (0..diag.len())
            .map(|c| {
                let coord = (0..diag.len()).find(|&r| v[(r, c)] == 1.0).unwrap_or(c);
                coordinate_polys[coord].clone()
            })
            .collect();
        FlowField::new(model, polys, rho)
    }

    pub fn linear(diag: &[f64]) -> Self {
        FlowField::diagonal(diag, vec![Polynomial::default(); diag.len()], f64::INFINITY).unwrap()
    }

    /// D = diag(−1, extra…) with the quartic t⁴/4 on the first coordinate, so
    /// that the first coordinate follows ẏ = y − y³.
    pub fn double_well(extra: &[f64], rho: f64) -> Self {
        let mut diag = vec![-1.0];
        diag.extend_from_slice(extra);
        let mut polys = vec![Polynomial::default(); diag.len()];
        polys[0] = Polynomial(vec![0.0, 0.0, 0.0, 0.0, 0.25]);
        FlowField::diagonal(&diag, polys, rho).unwrap()
    }

    /// F(y) = −y + y³/(4R²) coordinatewise: equilibria on the sphere of radius 2R
    /// along every axis.
    pub fn boundary_equilibria(n: usize, r: f64) -> Self {
        let quartic = Polynomial(vec![0.0, 0.0, 0.0, 0.0, 1.0 / (16.0 * r * r)]);
        FlowField::diagonal(&vec![-1.0; n], vec![quartic; n], 4.0 * r * (n as f64).sqrt()).unwrap()
    }

    /// k·F: same orbits and Conley indices, time rescaled by k.
    pub fn scaled(&self, k: f64) -> Result<Self, FdaError> {
        if !(k > 0.0) {
            return Err(FdaError::Invalid("scale must be positive".into()));
        }
        let polys = self.polys.iter().map(|p| Polynomial(p.0.iter().map(|x| x * k).collect())).collect();
        FlowField::new(self.model.scaled(k), polys, self.rho)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn model(&self) -> &SpectralModel {
        &self.model
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.rho
    }

    fn to_eigen(&self, x: &[f64]) -> Vec<f64> {
        (self.model.eigenvectors().transpose() * DVector::from_column_slice(x)).iter().copied().collect()
    }

    fn from_eigen(&self, z: &[f64]) -> Vec<f64> {
        (self.model.eigenvectors() * DVector::from_column_slice(z)).iter().copied().collect()
    }

    /// ∇ of the potential in eigen-coordinates.
    pub fn eval_eigen(&self, z: &[f64]) -> Vec<f64> {
        let lambda = self.model.eigenvalues();
        let norm = z.iter().map(|t| t * t).sum::<f64>().sqrt();
        let (chi, dchi) = cutoff(norm / self.rho);
        let phi: f64 = if dchi != 0.0 { self.polys.iter().zip(z).map(|(p, t)| p.eval(*t)).sum() } else { 0.0 };
        (0..z.len())
            .map(|i| {
                let mut g = lambda[i] * z[i];
                if chi != 0.0 {
                    g += chi * self.polys[i].derivative().eval(z[i]);
                }
                if dchi != 0.0 && norm > 0.0 {
                    g += phi * dchi / self.rho * z[i] / norm;
                }
                g
            })
            .collect()
    }

    /// F(x).
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.from_eigen(&self.eval_eigen(&self.to_eigen(x)))
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        let z = self.to_eigen(x);
        let norm = z.iter().map(|t| t * t).sum::<f64>().sqrt();
        let quad: f64 = z.iter().zip(self.model.eigenvalues()).map(|(t, l)| 0.5 * l * t * t).sum();
        let phi: f64 = self.polys.iter().zip(&z).map(|(p, t)| p.eval(*t)).sum();
        quad + cutoff(norm / self.rho).0 * phi
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.model.eigenvalues().iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Global Lipschitz bound for Q (supported in |x| ≤ 2ρ).
    pub fn lipschitz_q(&self) -> f64 {
        let a = 2.0 * self.rho;
        let hess = self.polys.iter().map(|p| p.derivative().derivative().sup_bound(a)).fold(0.0, f64::max);
        if self.polys.iter().all(|p| p.0.iter().all(|c| *c == 0.0)) {
            return 0.0;
        }
        let grad = self.polys.iter().map(|p| p.derivative().sup_bound(a).powi(2)).sum::<f64>().sqrt();
        let phi: f64 = self.polys.iter().map(|p| p.sup_bound(a)).sum();
        hess + 2.0 * CUTOFF_D1 * grad / self.rho + phi * (CUTOFF_D2 + CUTOFF_D1) / (self.rho * self.rho)
    }

    /// Lipschitz bound for the eigen-window `indices` on the cube |zᵢ| ≤ a,
    /// valid when the cube lies inside the cutoff radius.
    pub fn lipschitz_on_box(&self, indices: &[usize], a: f64) -> f64 {
        let lambda = self.model.eigenvalues();
        if a * (indices.len() as f64).sqrt() > self.rho {
            return self.max_abs_eigenvalue() + self.lipschitz_q();
        }
        indices
            .iter()
            .map(|&i| lambda[i].abs() + self.polys[i].derivative().derivative().sup_bound(a))
            .fold(0.0, f64::max)
    }
}

fn rk4(f: &dyn Fn(&[f64]) -> Vec<f64>, x0: &[f64], h: f64, steps: usize) -> Result<Vec<Vec<f64>>, FdaError> {
    let axpy = |x: &[f64], a: f64, v: &[f64]| -> Vec<f64> { x.iter().zip(v).map(|(x, v)| x + a * v).collect() };
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = x0.to_vec();
    out.push(y.clone());
    for step in 1..=steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, h / 2.0, &k1));
        let k3 = f(&axpy(&y, h / 2.0, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !y.iter().all(|v| v.is_finite()) || y.iter().map(|v| v * v).sum::<f64>().sqrt() > 1e6 {
            return Err(FdaError::Blowup(step));
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// RK4 trajectory of ẏ = −F(y).
pub fn integrate(field: &FlowField, x0: &[f64], h: f64, steps: usize) -> Result<Vec<Vec<f64>>, FdaError> {
    if x0.len() != field.dim() {
        return Err(FdaError::Invalid(format!("initial point of length {} in dimension {}", x0.len(), field.dim())));
    }
    let product = h * (field.max_abs_eigenvalue() + field.lipschitz_q());
    if product >= 0.5 {
        return Err(FdaError::StepTooCoarse { h, product });
    }
    rk4(&|y| field.eval(y).into_iter().map(|v| -v).collect(), x0, h, steps)
}

/// The flow compressed to W = span of eigenvectors with eigenvalues in an
/// interval, written in the eigen-coordinates of W.
#[derive(Debug, Clone)]
pub struct CompressedFlow {
    field: FlowField,
    interval: Interval,
    indices: Vec<usize>,
    box_half_width: Option<f64>,
}

pub fn compress(field: &FlowField, interval: Interval) -> Result<CompressedFlow, FdaError> {
    let indices: Vec<usize> =
        (0..field.dim()).filter(|&i| interval.contains(field.model().eigenvalues()[i])).collect();
    if indices.is_empty() {
        return Err(FdaError::EmptySubspace(interval));
    }
    Ok(CompressedFlow { field: field.clone(), interval, indices, box_half_width: None })
}

impl CompressedFlow {
    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Restricts the Lipschitz bound to the cube |wᵢ| ≤ a.
    pub fn with_box(mut self, a: f64) -> Self {
        self.box_half_width = Some(a);
        self
    }

    /// Orthonormal basis of W as columns.
    pub fn basis(&self) -> DMatrix<f64> {
        let v = self.field.model().eigenvectors();
        DMatrix::from_fn(self.field.dim(), self.indices.len(), |r, c| v[(r, self.indices[c])])
    }

    /// Number of negative eigenvalues of D on W.
    pub fn negative_count(&self) -> usize {
        self.indices.iter().filter(|&&i| self.field.model().eigenvalues()[i] < 0.0).count()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        (self.basis().transpose() * DVector::from_column_slice(x)).iter().copied().collect()
    }

    pub fn lift(&self, w: &[f64]) -> Vec<f64> {
        (self.basis() * DVector::from_column_slice(w)).iter().copied().collect()
    }

    /// π_W F on W, in W-coordinates.
    pub fn eval_w(&self, w: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.field.dim()];
        for (k, &i) in self.indices.iter().enumerate() {
            z[i] = w[k];
        }
        let g = self.field.eval_eigen(&z);
        self.indices.iter().map(|&i| g[i]).collect()
    }

    /// π_W F(x) for x ∈ ℝⁿ, as an ambient vector.
    pub fn eval_ambient(&self, x: &[f64]) -> Vec<f64> {
        self.lift(&self.eval_w(&self.project(x)))
    }

    /// RK4 trajectory of ẏ = −π_W F(y) from π_W x0, in ambient coordinates.
    pub fn integrate(&self, x0: &[f64], h: f64, steps: usize) -> Result<Vec<Vec<f64>>, FdaError> {
        let product = h * (self.field.max_abs_eigenvalue() + self.field.lipschitz_q());
        if product >= 0.5 {
            return Err(FdaError::StepTooCoarse { h, product });
        }
        let w = rk4(&|w| self.eval_w(w).into_iter().map(|v| -v).collect(), &self.project(x0), h, steps)?;
        Ok(w.iter().map(|w| self.lift(w)).collect())
    }
}

impl VectorField for CompressedFlow {
    fn dim(&self) -> usize {
        self.indices.len()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.eval_w(x).into_iter().map(|v| -v).collect()
    }

    fn lipschitz(&self) -> f64 {
        match self.box_half_width {
            Some(a) => self.field.lipschitz_on_box(&self.indices, a),
            None => self.field.max_abs_eigenvalue() + self.field.lipschitz_q(),
        }
    }
}

/// Discretisation used for each compressed level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelGrid {
    /// Cells per axis for compressed dimensions 1, 2 and 3.
    pub resolution: [usize; 3],
    /// Time step of the cubical map.
    pub h: f64,
    /// Box half-width as a multiple of 2R.
    pub box_factor: f64,
    /// Sphere samples for the full-dimensional precheck.
    pub sphere_samples: usize,
    pub seed: u64,
}

impl Default for LevelGrid {
    fn default() -> Self {
        LevelGrid { resolution: [128, 48, 20], h: 0.1, box_factor: 1.1, sphere_samples: 4000, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelIsolation {
    pub interval: String,
    pub dim: usize,
    pub isolating: bool,
    pub witnesses: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsolationReport {
    /// Smallest sphere value of |F| found by the full-dimensional precheck.
    pub sphere_min_norm: f64,
    pub levels: Vec<LevelIsolation>,
    /// First level from which every later level is isolating.
    pub threshold: Option<usize>,
}

struct LevelSetup {
    flow: CompressedFlow,
    dynamics: crate::conley::CubicalDynamics,
    x: CellSet,
}

fn level_setup(field: &FlowField, r: f64, interval: Interval, grid: &LevelGrid) -> Result<LevelSetup, FdaError> {
    let flow = compress(field, interval)?;
    let k = flow.indices().len();
    if k > 3 {
        return Err(FdaError::TooManyDimensions(k));
    }
    let a = 2.0 * r * grid.box_factor;
    let flow = flow.with_box(a);
    let dynamics = outer_approximation(&flow, Grid::cube(k, a, grid.resolution[k - 1])?, grid.h)?;
    let x = dynamics.grid().ball(2.0 * r);
    Ok(LevelSetup { flow, dynamics, x })
}

/// Full-dimensional check that F has no zero on the sphere |x| = 2R: the axis
/// points ±2R·eᵢ of the eigenbasis plus seeded random samples. Returns the
/// smallest norm found and the point where it occurs.
fn sphere_precheck(field: &FlowField, r: f64, grid: &LevelGrid) -> (f64, Vec<f64>) {
    let n = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut z = vec![0.0; n];
            z[i] = s * 2.0 * r;
            points.push(field.from_eigen(&z));
        }
    }
    for _ in 0..grid.sphere_samples {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-3 {
            points.push(v.iter().map(|t| t * 2.0 * r / norm).collect());
        }
    }
    points
        .into_iter()
        .map(|p| (field.eval(&p).iter().map(|t| t * t).sum::<f64>().sqrt(), p))
        .fold((f64::INFINITY, Vec::new()), |best, cur| if cur.0 < best.0 { cur } else { best })
}

const SPHERE_ZERO_TOL: f64 = 1e-9;

pub fn isolating_persistence(
    field: &FlowField,
    r: f64,
    levels: &[Interval],
    grid: &LevelGrid,
) -> Result<IsolationReport, FdaError> {
    let (sphere_min_norm, at) = sphere_precheck(field, r, grid);
    if sphere_min_norm <= SPHERE_ZERO_TOL * (1.0 + field.max_abs_eigenvalue() * r) {
        return Err(FdaError::NeverIsolating { level: None, witnesses: vec![at] });
    }
    if field.dim() <= 3 {
        let full = level_setup(field, r, Interval::all(), grid)?;
        let w = isolation_witnesses(&full.x, &full.dynamics);
        if !w.is_empty() {
            let witnesses = w.iter().map(|c| full.flow.lift(&full.dynamics.grid().center(c))).collect();
            return Err(FdaError::NeverIsolating { level: None, witnesses });
        }
    }
    let mut out = Vec::with_capacity(levels.len());
    let mut last_witnesses = Vec::new();
    for &interval in levels {
        let setup = level_setup(field, r, interval, grid)?;
        let w = isolation_witnesses(&setup.x, &setup.dynamics);
        if !w.is_empty() {
            last_witnesses = w.iter().map(|c| setup.flow.lift(&setup.dynamics.grid().center(c))).collect();
        }
        out.push(LevelIsolation {
            interval: interval.to_string(),
            dim: setup.flow.indices().len(),
            isolating: w.is_empty(),
            witnesses: w.len(),
        });
    }
    if !levels.is_empty() && out.iter().all(|l| !l.isolating) {
        return Err(FdaError::NeverIsolating { level: Some(levels.len() - 1), witnesses: last_witnesses });
    }
    let threshold = (0..=out.len()).find(|&i| out[i..].iter().all(|l| l.isolating)).filter(|&i| i < out.len());
    Ok(IsolationReport { sphere_min_norm, levels: out, threshold })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelIndex {
    pub interval: String,
    pub dim: usize,
    /// Number of negative eigenvalues of D in the window.
    pub negative: usize,
    /// Relative homology ranks of the index pair, degrees 0..=dim.
    pub homology: Vec<usize>,
    /// Nonzero (degree − negative, rank) entries.
    pub shifted: Vec<(i64, usize)>,
    pub commutator_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizationReport {
    pub levels: Vec<LevelIndex>,
}

impl StabilizationReport {
    pub fn max_commutator_norm(&self) -> f64 {
        self.levels.iter().map(|l| l.commutator_norm).fold(0.0, f64::max)
    }
}

/// Conley index of one compressed level together with its desuspension shift.
pub fn level_index(field: &FlowField, r: f64, interval: Interval, grid: &LevelGrid) -> Result<LevelIndex, FdaError> {
    let setup = level_setup(field, r, interval, grid)?;
    if !is_isolating(&setup.x, &setup.dynamics) {
        let w = isolation_witnesses(&setup.x, &setup.dynamics);
        let witnesses = w.iter().map(|c| setup.flow.lift(&setup.dynamics.grid().center(c))).collect();
        return Err(FdaError::NeverIsolating { level: None, witnesses });
    }
    let pair = build_index_pair(&CellSet::new(), &CellSet::new(), &setup.x, &setup.dynamics)?;
    let negative = setup.flow.negative_count();
    let shifted = pair
        .homology
        .iter()
        .enumerate()
        .filter(|(_, &rank)| rank > 0)
        .map(|(d, &rank)| (d as i64 - negative as i64, rank))
        .collect();
    let commutator_norm = commutator_norm(field.model(), &field.model().projection(interval))?;
    Ok(LevelIndex {
        interval: interval.to_string(),
        dim: setup.flow.indices().len(),
        negative,
        homology: pair.homology,
        shifted,
        commutator_norm,
    })
}

/// Computes the shifted Conley index at every level and checks that they agree.
pub fn desuspension_stabilization(
    field: &FlowField,
    r: f64,
    levels: &[Interval],
    grid: &LevelGrid,
) -> Result<StabilizationReport, FdaError> {
    let mut out = Vec::with_capacity(levels.len());
    for (k, &interval) in levels.iter().enumerate() {
        let level = level_index(field, r, interval, grid).map_err(|e| match e {
            FdaError::NeverIsolating { witnesses, .. } => FdaError::NeverIsolating { level: Some(k), witnesses },
            other => other,
        })?;
        if let Some(prev) = out.last() {
            let prev: &LevelIndex = prev;
            if prev.shifted != level.shifted {
                return Err(FdaError::StabilizationFailure { first: k - 1, second: k });
            }
        }
        out.push(level);
    }
    Ok(StabilizationReport { levels: out })
}

/// A field with its ball radius R, spectral levels and discretisation.
#[derive(Debug, Clone)]
pub struct Example {
    pub name: &'static str,
    pub field: FlowField,
    pub radius: f64,
    pub levels: Vec<Interval>,
    pub grid: LevelGrid,
}

/// Time scale applied to the bundled examples; it leaves Conley indices
/// unchanged and keeps the Lipschitz padding small against the displacement.
pub const EXAMPLE_TIME_SCALE: f64 = 50.0;

fn scaled_levels(levels: &[(f64, f64)], k: f64) -> Vec<Interval> {
    levels.iter().map(|&(a, b)| Interval::new(a * k, b * k)).collect()
}

/// The linear field D = diag(−2, 3, −4, 6, −7, 8) on B(2) with three levels.
pub fn linear_example() -> Example {
    let k = EXAMPLE_TIME_SCALE;
    Example {
        name: "linear",
        field: FlowField::linear(&[-2.0, 3.0, -4.0, 6.0, -7.0, 8.0]).scaled(k).unwrap(),
        radius: 1.0,
        levels: scaled_levels(&[(-2.5, 2.5), (-3.5, 3.5), (-4.5, 4.5)], k),
        grid: LevelGrid { h: 0.004, resolution: [128, 96, 40], ..LevelGrid::default() },
    }
}

/// The double well in the first coordinate of a six-dimensional system with
/// D = diag(−1, 5, −6, 7, −8, 9), on B(2.5) with three levels.
pub fn double_well_example() -> Example {
    let k = EXAMPLE_TIME_SCALE;
    Example {
        name: "double-well",
        field: FlowField::double_well(&[5.0, -6.0, 7.0, -8.0, 9.0], 5.0).scaled(k).unwrap(),
        radius: 1.25,
        levels: scaled_levels(&[(-1.5, 1.5), (-5.5, 5.5), (-6.5, 6.5)], k),
        grid: LevelGrid { h: 0.006, resolution: [128, 96, 24], ..LevelGrid::default() },
    }
}

pub fn example(name: &str) -> Option<Example> {
    match name {
        "linear" => Some(linear_example()),
        "double-well" => Some(double_well_example()),
        _ => None,
    }
}

/// Parses "(a,b];(c,d]" style level lists; brackets are optional and every
/// interval is read as (a, b].
pub fn parse_levels(text: &str) -> Result<Vec<Interval>, FdaError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let inner = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 2 {
                return Err(FdaError::Levels(s.to_string()));
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| FdaError::Levels(s.to_string()))?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| FdaError::Levels(s.to_string()))?;
            if !(lo < hi) {
                return Err(FdaError::Levels(s.to_string()));
            }
            Ok(Interval::new(lo, hi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_evaluation() {
        let p = Polynomial(vec![1.0, 0.0, 3.0]);
        assert_eq!(p.eval(2.0), 13.0);
        assert_eq!(p.derivative(), Polynomial(vec![0.0, 6.0]));
    }

    #[test]
    fn cutoff_is_continuous() {
        assert_eq!(cutoff(0.5), (1.0, 0.0));
        assert_eq!(cutoff(2.5), (0.0, 0.0));
        assert!((cutoff(1.5).0 - 0.5).abs() < 1e-15);
        assert!((cutoff(1.0 + 1e-9).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_well_coordinate_order() {
        let f = FlowField::double_well(&[5.0, -6.0], 10.0);
        let v = f.eval(&[2.0, 0.0, 0.0]);
        assert!((v[0] - (-2.0 + 8.0)).abs() < 1e-12);
        let w = f.eval(&[0.0, 1.0, 1.0]);
        assert!((w[1] - 5.0).abs() < 1e-12 && (w[2] + 6.0).abs() < 1e-12);
    }

    #[test]
    fn levels_parse() {
        let l = parse_levels("(-1,1);(-2,2];[-4,4]").unwrap();
        assert_eq!(l.len(), 3);
        assert!(l[2].contains(4.0) && !l[2].contains(-4.0));
        assert!(parse_levels("(1,0)").is_err());
        assert!(parse_levels("oops").is_err());
    }
}
