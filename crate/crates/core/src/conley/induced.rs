//! Maps from a pair (A, B) into the Conley index: induced homomorphisms into
//! two index pairs and their comparison through the bridge pairs and their
//! intersection.

use serde::Serialize;

use super::dynamics::CubicalDynamics;
use super::grid::CellSet;
use super::homology::{cell_cube, mat_inverse, mat_mul, mat_rank, signed_matrix, Cube, ModMatrix, PairHomology, RelativeComplex};
use super::index_pair::{bridge_pair, check_hypotheses, intersect_index_pairs, validate_index_pair, IndexPair};
use super::ConleyError;

/// Cellular map from (A, B) into X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellMap {
    /// Identity on cells.
    Inclusion,
    /// Every cell goes to the given cell; on chains, vertices go to its lowest
    /// vertex and higher cubes to zero.
    Collapse(usize),
}

impl CellMap {
    pub fn image_set(&self, s: &CellSet) -> CellSet {
        match self {
            CellMap::Inclusion => s.clone(),
            CellMap::Collapse(c) if !s.is_empty() => std::iter::once(*c).collect(),
            CellMap::Collapse(_) => CellSet::new(),
        }
    }
}

/// Per-degree matrices are reported as signed residues mod p.
#[derive(Debug, Clone, Serialize)]
pub struct InducedMapReport {
    pub source_homology: Vec<usize>,
    pub pair_homology: [Vec<usize>; 2],
    pub bridge_homology: [Vec<usize>; 2],
    pub intersection_homology: Vec<usize>,
    /// H(A, B) → H(Nᵢ, Lᵢ).
    pub maps: [Vec<Vec<Vec<i64>>>; 2],
    /// The first map carried to H(N₂, L₂) through bridge 1, the intersection and bridge 2.
    pub transported: Vec<Vec<Vec<i64>>>,
    /// Ranks of the two induced maps per degree.
    pub ranks: [Vec<usize>; 2],
    pub commutes: bool,
}

fn homology_of(pair: &IndexPair, dynamics: &CubicalDynamics) -> PairHomology {
    PairHomology::compute(RelativeComplex::new(dynamics.grid(), &pair.n, &pair.l))
}

fn inclusion(from: &PairHomology, to: &PairHomology) -> Result<Vec<ModMatrix>, ConleyError> {
    from.induced_matrices(to, |c| Some(*c))
}

pub fn induced_map_check(
    f: CellMap,
    a: &CellSet,
    b: &CellSet,
    p1: &IndexPair,
    p2: &IndexPair,
    x: &CellSet,
    dynamics: &CubicalDynamics,
) -> Result<InducedMapReport, ConleyError> {
    let grid = dynamics.grid();
    check_hypotheses(&f.image_set(a), &f.image_set(b), x, dynamics)?;
    let source = PairHomology::compute(RelativeComplex::new(grid, a, b));
    let n = grid.dim();
    let target_vertex = match f {
        CellMap::Collapse(c) => Some(cell_cube(grid, c).base_vertex(n)),
        CellMap::Inclusion => None,
    };
    let cube_map = |c: &Cube| -> Option<Cube> {
        match target_vertex {
            None => Some(*c),
            Some(v) if c.dim() == 0 => Some(v),
            Some(_) => None,
        }
    };

    let pairs = [homology_of(p1, dynamics), homology_of(p2, dynamics)];
    let maps = [source.induced_matrices(&pairs[0], cube_map)?, source.induced_matrices(&pairs[1], cube_map)?];

    let mut bridges = Vec::with_capacity(2);
    for p in [p1, p2] {
        let bridge = bridge_pair(p, x, dynamics);
        if !validate_index_pair(&bridge, x, dynamics).passed() {
            return Err(ConleyError::BridgeValidationFailed("bridge pair is not an index pair".into()));
        }
        bridges.push(homology_of(&bridge, dynamics));
    }
    let meet = intersect_index_pairs(p1, p2, x, dynamics)
        .map_err(|e| ConleyError::BridgeValidationFailed(e.to_string()))?;
    let meet = homology_of(&meet, dynamics);

    let iota = [inclusion(&pairs[0], &bridges[0])?, inclusion(&pairs[1], &bridges[1])?];
    let j = [inclusion(&meet, &bridges[0])?, inclusion(&meet, &bridges[1])?];

    let src = source.betti();
    let r = [pairs[0].betti(), pairs[1].betti()];
    let rb = [bridges[0].betti(), bridges[1].betti()];
    let rm = meet.betti();
    let degrees = maps[0].len();
    let mut transported = Vec::with_capacity(degrees);
    let mut commutes = true;
    for k in 0..degrees {
        let j1_inv = mat_inverse(&j[0][k]).filter(|_| rm[k] == rb[0][k]).ok_or_else(|| {
            ConleyError::BridgeValidationFailed(format!("intersection to bridge 1 is not invertible in degree {k}"))
        })?;
        let i2_inv = mat_inverse(&iota[1][k]).filter(|_| r[1][k] == rb[1][k]).ok_or_else(|| {
            ConleyError::BridgeValidationFailed(format!("pair 2 to bridge 2 is not invertible in degree {k}"))
        })?;
        let step = mat_mul(&iota[0][k], &maps[0][k], r[0][k], src[k]);
        let step = mat_mul(&j1_inv, &step, rb[0][k], src[k]);
        let step = mat_mul(&j[1][k], &step, rm[k], src[k]);
        let step = mat_mul(&i2_inv, &step, rb[1][k], src[k]);
        commutes &= step == maps[1][k];
        transported.push(signed_matrix(&step));
    }

    Ok(InducedMapReport {
        source_homology: src,
        ranks: [maps[0].iter().map(mat_rank).collect(), maps[1].iter().map(mat_rank).collect()],
        maps: [maps[0].iter().map(signed_matrix).collect(), maps[1].iter().map(signed_matrix).collect()],
        pair_homology: r,
        bridge_homology: rb,
        intersection_homology: rm,
        transported,
        commutes,
    })
}
