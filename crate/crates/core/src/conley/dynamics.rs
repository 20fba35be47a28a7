//! Vector fields, RK4 time-h maps and their outer approximation by
//! multivalued maps on grid cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{CellSet, Grid};
use super::ConleyError;

/// A smooth vector field v with a Lipschitz bound on the region of interest.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    fn lipschitz(&self) -> f64;
}

fn axpy(x: &[f64], a: f64, v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(x, v)| x + a * v).collect()
}

/// One classical Runge–Kutta step of ẋ = v(x).
pub fn rk4_step(field: &dyn VectorField, x: &[f64], h: f64) -> Vec<f64> {
    let k1 = field.eval(x);
    let k2 = field.eval(&axpy(x, h / 2.0, &k1));
    let k3 = field.eval(&axpy(x, h / 2.0, &k2));
    let k4 = field.eval(&axpy(x, h, &k3));
    (0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
}

/// Time-h map by RK4 with enough substeps that each substep satisfies Λ·dt ≤ 1/4.
pub fn flow_map(field: &dyn VectorField, x: &[f64], h: f64) -> Vec<f64> {
    let sub = ((field.lipschitz() * h.abs() / 0.25).ceil() as usize).max(1);
    let dt = h / sub as f64;
    let mut y = x.to_vec();
    for _ in 0..sub {
        y = rk4_step(field, &y, dt);
    }
    y
}

/// Multivalued map on the cells of a grid: `image(c)` lists the grid cells
/// meeting the enclosure of the flow image of c; `exits(c)` records whether the
/// enclosure leaves the box.
#[derive(Debug, Clone)]
pub struct CubicalDynamics {
    grid: Grid,
    h: f64,
    padding: f64,
    images: Vec<Vec<usize>>,
    exits: Vec<bool>,
    preimages: Vec<Vec<usize>>,
}

impl CubicalDynamics {
    /// Builds a dynamics from explicit images (used for hand-made examples).
    pub fn from_images(grid: Grid, images: Vec<Vec<usize>>, exits: Vec<bool>) -> Result<Self, ConleyError> {
        if images.len() != grid.len() || exits.len() != grid.len() {
            return Err(ConleyError::BadGrid("image table does not match the grid".into()));
        }
        let mut preimages = vec![Vec::new(); grid.len()];
        let mut images = images;
        for (c, im) in images.iter_mut().enumerate() {
            im.sort_unstable();
            im.dedup();
            if im.is_empty() && !exits[c] {
                return Err(ConleyError::EmptyImage(c));
            }
            for &d in im.iter() {
                if d >= grid.len() {
                    return Err(ConleyError::BadGrid(format!("cell {c} maps to missing cell {d}")));
                }
                preimages[d].push(c);
            }
        }
        Ok(CubicalDynamics { grid, h: 0.0, padding: 0.0, images, exits, preimages })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn padding(&self) -> f64 {
        self.padding
    }

    pub fn image(&self, c: usize) -> &[usize] {
        &self.images[c]
    }

    pub fn preimage(&self, c: usize) -> &[usize] {
        &self.preimages[c]
    }

    pub fn exits(&self, c: usize) -> bool {
        self.exits[c]
    }

    /// Whether the image of `c` lies inside `set` (and inside the box).
    pub fn image_within(&self, c: usize, set: &[bool]) -> bool {
        !self.exits[c] && self.images[c].iter().all(|&d| set[d])
    }

    /// Fraction of sampled points whose RK4 image lands in (or touches) an image
    /// cell, or outside the box for exiting cells. Sampling only, not a proof.
    pub fn soundness_check(&self, field: &dyn VectorField, samples_per_cell: usize, seed: u64) -> SoundnessReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.grid.dim();
        let mut failures = Vec::new();
        let mut total = 0;
        for c in 0..self.grid.len() {
            let lo = self.grid.cell_lo(c);
            for _ in 0..samples_per_cell {
                let x: Vec<f64> = (0..n).map(|a| lo[a] + rng.gen::<f64>() * self.grid.cell_size(a)).collect();
                let y = flow_map(field, &x, self.h);
                total += 1;
                let hits = self.grid.cells_meeting_box(&y, &y);
                let ok = if hits.is_empty() { self.exits[c] } else { hits.iter().any(|d| self.images[c].binary_search(d).is_ok()) };
                if !ok {
                    failures.push(c);
                }
            }
        }
        failures.sort_unstable();
        failures.dedup();
        SoundnessReport { samples: total, failing_cells: failures }
    }
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub samples: usize,
    pub failing_cells: Vec<usize>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.failing_cells.is_empty()
    }
}

/// map(c) = cells meeting the bounding box of the time-h images of the corners
/// of c, inflated by Λh² + diam(c).
pub fn outer_approximation(field: &dyn VectorField, grid: Grid, h: f64) -> Result<CubicalDynamics, ConleyError> {
    if field.dim() != grid.dim() {
        return Err(ConleyError::BadGrid(format!("field of dimension {} on a {}-dimensional grid", field.dim(), grid.dim())));
    }
    let n = grid.dim();
    let padding = field.lipschitz() * h * h + grid.cell_diameter();
    let smallest_extent = (0..n).map(|a| grid.hi()[a] - grid.lo()[a]).fold(f64::INFINITY, f64::min);
    if 2.0 * padding >= smallest_extent {
        return Err(ConleyError::ResolutionTooCoarse { padding, extent: smallest_extent });
    }
    let mut images = Vec::with_capacity(grid.len());
    let mut exits = Vec::with_capacity(grid.len());
    for c in 0..grid.len() {
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for corner in grid.corners(c) {
            let y = flow_map(field, &corner, h);
            for a in 0..n {
                lo[a] = lo[a].min(y[a]);
                hi[a] = hi[a].max(y[a]);
            }
        }
        for a in 0..n {
            lo[a] -= padding;
            hi[a] += padding;
        }
        let leaves = (0..n).any(|a| lo[a] < grid.lo()[a] || hi[a] > grid.hi()[a]);
        images.push(grid.cells_meeting_box(&lo, &hi));
        exits.push(leaves);
    }
    let mut dynamics = CubicalDynamics::from_images(grid, images, exits)?;
    dynamics.h = h;
    dynamics.padding = padding;
    Ok(dynamics)
}

/// Forward image of a set of cells (cells inside the grid only).
pub fn image_of(dynamics: &CubicalDynamics, set: &CellSet) -> CellSet {
    set.iter().flat_map(|c| dynamics.image(c).iter().copied()).collect()
}
