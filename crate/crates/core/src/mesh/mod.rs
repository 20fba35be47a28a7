//! Oriented simplicial complexes (pseudo-manifolds of dimension 1–3, possibly with
//! boundary), their boundary complexes and rational Betti numbers.

mod generators;
mod off;

pub use generators::{catalogue, generate, parse_generator, GeneratorKind, GeneratorSpec};
pub use off::{parse_off, read_off};

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::linalg::{self, CsrMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("no top simplices given")]
    Empty,
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("top simplex {index} has {found} vertices, expected {expected}")]
    MixedDimension { index: usize, found: usize, expected: usize },
    #[error("top simplex {0} repeats a vertex")]
    DegenerateSimplex(usize),
    #[error("vertex indices are not contiguous: vertex {0} is unused")]
    NonContiguousVertices(usize),
    #[error("codimension-1 face {face:?} lies in {count} top simplices")]
    NonManifold { face: Vec<usize>, count: usize },
    #[error("complex is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("no consistent orientation exists")]
    OrientationFailure,
    #[error("complex has empty boundary")]
    EmptyBoundary,
    #[error("geometry does not match the top simplices: {0}")]
    BadGeometry(String),
    #[error("mesh parse error: {0}")]
    Parse(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Vertex coordinates of each top simplex, listed in sorted vertex order.
///
/// Coordinates are stored per top simplex rather than per vertex so that
/// periodic meshes (tori) can carry a flat metric.
pub type TopGeometry = Vec<Vec<[f64; 3]>>;

#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    name: String,
    dim: usize,
    vertex_count: usize,
    /// `simplices[k]` holds the sorted vertex tuples of the k-simplices.
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    /// `boundary[k]` is ∂_k : C_k → C_{k-1}; `boundary[0]` is the empty 0×V map.
    boundary: Vec<CsrMatrix>,
    /// Sign of each top simplex relative to its sorted vertex order.
    orientation: Vec<i8>,
    /// Top simplices containing each (dim-1)-simplex.
    facet_cofaces: Vec<Vec<usize>>,
    geometry: Option<TopGeometry>,
}

impl SimplicialComplex {
    /// Builds a connected, oriented pseudo-manifold from its top simplices.
    pub fn build(top: &[Vec<usize>]) -> Result<Self, MeshError> {
        Self::build_inner(top, None, true)
    }

    /// As [`SimplicialComplex::build`], attaching per-top-simplex coordinates given in
    /// the same vertex order as `top`.
    pub fn build_with_geometry(top: &[Vec<usize>], coords: &[Vec<[f64; 3]>]) -> Result<Self, MeshError> {
        if coords.len() != top.len() {
            return Err(MeshError::BadGeometry(format!("{} coordinate lists for {} simplices", coords.len(), top.len())));
        }
        Self::build_inner(top, Some(coords), true)
    }

    /// Like `build` but vertex coordinates are shared (non-periodic meshes).
    pub fn build_with_positions(top: &[Vec<usize>], positions: &[[f64; 3]]) -> Result<Self, MeshError> {
        let mut coords = Vec::with_capacity(top.len());
        for t in top {
            let mut c = Vec::with_capacity(t.len());
            for &v in t {
                let p = positions
                    .get(v)
                    .ok_or_else(|| MeshError::BadGeometry(format!("vertex {v} has no position")))?;
                c.push(*p);
            }
            coords.push(c);
        }
        Self::build_inner(top, Some(&coords), true)
    }

    fn build_inner(top: &[Vec<usize>], coords: Option<&[Vec<[f64; 3]>]>, require_connected: bool) -> Result<Self, MeshError> {
        let first = top.first().ok_or(MeshError::Empty)?;
        let dim = first.len().saturating_sub(1);
        if !(1..=3).contains(&dim) {
            return Err(MeshError::UnsupportedDimension(dim));
        }
        let mut sorted_top = Vec::with_capacity(top.len());
        let mut geometry: Option<TopGeometry> = coords.map(|_| Vec::with_capacity(top.len()));
        for (i, t) in top.iter().enumerate() {
            if t.len() != dim + 1 {
                return Err(MeshError::MixedDimension { index: i, found: t.len(), expected: dim + 1 });
            }
            let mut order: Vec<usize> = (0..t.len()).collect();
            order.sort_by_key(|&j| t[j]);
            let s: Vec<usize> = order.iter().map(|&j| t[j]).collect();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(MeshError::DegenerateSimplex(i));
            }
            if let (Some(g), Some(c)) = (geometry.as_mut(), coords) {
                if c[i].len() != t.len() {
                    return Err(MeshError::BadGeometry(format!("simplex {i} has {} coordinates", c[i].len())));
                }
                g.push(order.iter().map(|&j| c[i][j]).collect());
            }
            sorted_top.push(s);
        }
        let vertex_count = sorted_top.iter().flatten().max().map_or(0, |m| m + 1);
        let mut used = vec![false; vertex_count];
        for &v in sorted_top.iter().flatten() {
            used[v] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::NonContiguousVertices(v));
        }

        // face lattice: every k-face of every top simplex
        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
        let mut index: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); dim + 1];
        simplices[0] = (0..vertex_count).map(|v| vec![v]).collect();
        for v in 0..vertex_count {
            index[0].insert(vec![v], v);
        }
        let mut dedup_top: HashMap<Vec<usize>, usize> = HashMap::new();
        for (i, t) in sorted_top.iter().enumerate() {
            if dedup_top.insert(t.clone(), i).is_some() {
                return Err(MeshError::NonManifold { face: t.clone(), count: 2 });
            }
        }
        for k in 1..dim {
            let mut faces: Vec<Vec<usize>> = Vec::new();
            for t in &sorted_top {
                for f in subsets(t, k + 1) {
                    faces.push(f);
                }
            }
            faces.sort();
            faces.dedup();
            for (i, f) in faces.iter().enumerate() {
                index[k].insert(f.clone(), i);
            }
            simplices[k] = faces;
        }
        // top simplices keep their input order
        for (i, t) in sorted_top.iter().enumerate() {
            index[dim].insert(t.clone(), i);
        }
        simplices[dim] = sorted_top.clone();

        let mut boundary = vec![CsrMatrix::zeros(0, vertex_count)];
        for k in 1..=dim {
            let mut trip = Vec::new();
            for (j, s) in simplices[k].iter().enumerate() {
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    let row = index[k - 1][&f];
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    trip.push((row, j, sign));
                }
            }
            boundary.push(CsrMatrix::from_triplets(simplices[k - 1].len(), simplices[k].len(), &trip));
        }

        // codim-1 incidence
        let nfacets = simplices[dim - 1].len();
        let mut facet_cofaces: Vec<Vec<usize>> = vec![Vec::new(); nfacets];
        for (j, t) in sorted_top.iter().enumerate() {
            for i in 0..t.len() {
                let mut f = t.clone();
                f.remove(i);
                facet_cofaces[index[dim - 1][&f]].push(j);
            }
        }
        for (fi, cof) in facet_cofaces.iter().enumerate() {
            if cof.len() > 2 {
                return Err(MeshError::NonManifold { face: simplices[dim - 1][fi].clone(), count: cof.len() });
            }
        }

        // strong connectivity + orientation propagation across shared facets
        let ntop = sorted_top.len();
        let mut orientation = vec![0i8; ntop];
        let mut components = 0;
        for start in 0..ntop {
            if orientation[start] != 0 {
                continue;
            }
            components += 1;
            orientation[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                let ts = &sorted_top[t];
                for i in 0..ts.len() {
                    let mut f = ts.clone();
                    f.remove(i);
                    let fi = index[dim - 1][&f];
                    let inc_t = if i % 2 == 0 { 1i8 } else { -1 };
                    for &u in &facet_cofaces[fi] {
                        if u == t {
                            continue;
                        }
                        let pos = sorted_top[u].iter().position(|v| !f.contains(v)).unwrap();
                        let inc_u = if pos % 2 == 0 { 1i8 } else { -1 };
                        // induced orientations on the shared facet must cancel
                        let want = -orientation[t] * inc_t * inc_u;
                        if orientation[u] == 0 {
                            orientation[u] = want;
                            queue.push_back(u);
                        } else if orientation[u] != want {
                            return Err(MeshError::OrientationFailure);
                        }
                    }
                }
            }
        }
        if require_connected && components > 1 {
            return Err(MeshError::Disconnected(components));
        }

        let complex = SimplicialComplex {
            name: String::from("complex"),
            dim,
            vertex_count,
            simplices,
            index,
            boundary,
            orientation,
            facet_cofaces,
            geometry,
        };
        debug_assert!(complex.boundary_squares_to_zero());
        Ok(complex)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of k-simplices (0 for k > dim).
    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        &self.simplices[k]
    }

    pub fn simplex_index(&self, simplex: &[usize]) -> Option<usize> {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.index.get(s.len().checked_sub(1)?)?.get(&s).copied()
    }

    /// ∂_k : C_k → C_{k-1} with entries ±1 (sorted vertex orientation).
    pub fn boundary_matrix(&self, k: usize) -> &CsrMatrix {
        &self.boundary[k]
    }

    /// Coboundary d_k = ∂_{k+1}ᵀ : C^k → C^{k+1}.
    pub fn coboundary_matrix(&self, k: usize) -> CsrMatrix {
        self.boundary[k + 1].transpose()
    }

    pub fn orientation(&self) -> &[i8] {
        &self.orientation
    }

    pub fn geometry(&self) -> Option<&TopGeometry> {
        self.geometry.as_ref()
    }

    /// Top simplices containing the given (dim-1)-simplex.
    pub fn facet_cofaces(&self, facet: usize) -> &[usize] {
        &self.facet_cofaces[facet]
    }

    /// Indices of (dim-1)-simplices lying in exactly one top simplex.
    pub fn boundary_facets(&self) -> Vec<usize> {
        (0..self.facet_cofaces.len()).filter(|&f| self.facet_cofaces[f].len() == 1).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.facet_cofaces.iter().all(|c| c.len() == 2)
    }

    /// Checks ∂_k ∘ ∂_{k+1} = 0 exactly for every k.
    pub fn boundary_squares_to_zero(&self) -> bool {
        (1..self.dim).all(|k| self.boundary[k].matmul(&self.boundary[k + 1]).nnz() == 0)
    }

    /// Rational Betti numbers b_0..b_dim, from ranks of the boundary matrices.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.dim + 1)
            .map(|k| {
                if k == 0 || k > self.dim {
                    0
                } else {
                    linalg::numerical_rank(&self.boundary[k].to_dense())
                }
            })
            .collect();
        (0..=self.dim).map(|k| self.count(k) - ranks[k] - ranks[k + 1]).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim).map(|k| if k % 2 == 0 { self.count(k) as i64 } else { -(self.count(k) as i64) }).sum()
    }

    /// The closed (dim-1)-complex formed by the boundary facets.
    pub fn boundary_complex(&self) -> Result<BoundaryComplex, MeshError> {
        BoundaryComplex::new(self)
    }

    /// Vertex flags: `true` for vertices on the boundary.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertex_count];
        for f in self.boundary_facets() {
            for &v in &self.simplices[self.dim - 1][f] {
                mask[v] = true;
            }
        }
        mask
    }

    /// Coordinates of a k-simplex, taken from any top simplex containing it.
    pub(crate) fn simplex_coordinates(&self, k: usize, idx: usize) -> Option<Vec<[f64; 3]>> {
        let geom = self.geometry.as_ref()?;
        let s = &self.simplices[k][idx];
        let (t, tv) = self.simplices[self.dim]
            .iter()
            .enumerate()
            .find(|(_, t)| s.iter().all(|v| t.contains(v)))?;
        let _ = tv;
        let tverts = &self.simplices[self.dim][t];
        Some(s.iter().map(|v| geom[t][tverts.iter().position(|w| w == v).unwrap()]).collect())
    }

    /// For each k-simplex, the top simplices that contain it.
    pub fn top_cofaces(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count(k)];
        for (t, ts) in self.simplices[self.dim].iter().enumerate() {
            for f in subsets(ts, k + 1) {
                out[self.index[k][&f]].push(t);
            }
        }
        out
    }
}

/// All size-`m` subsets of a sorted slice, in lexicographic order.
pub(crate) fn subsets(s: &[usize], m: usize) -> Vec<Vec<usize>> {
    let n = s.len();
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.iter().map(|&i| s[i]).collect());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
            if i == 0 && idx[0] == n - m {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The boundary ∂M as a closed complex of dimension dim−1, with maps back
/// into the parent and its partition into connected components N_i.
#[derive(Debug, Clone)]
pub struct BoundaryComplex {
    complex: SimplicialComplex,
    /// boundary vertex → parent vertex
    vertex_map: Vec<usize>,
    /// `simplex_maps[k][i]` = parent index of boundary k-simplex i
    simplex_maps: Vec<Vec<usize>>,
    /// component id of every boundary vertex
    vertex_component: Vec<usize>,
    component_count: usize,
}

impl BoundaryComplex {
    fn new(parent: &SimplicialComplex) -> Result<Self, MeshError> {
        let facets = parent.boundary_facets();
        if facets.is_empty() {
            return Err(MeshError::EmptyBoundary);
        }
        let d = parent.dim;
        let mut vertex_map: Vec<usize> = facets.iter().flat_map(|&f| parent.simplices[d - 1][f].clone()).collect();
        vertex_map.sort_unstable();
        vertex_map.dedup();
        let mut local = vec![usize::MAX; parent.vertex_count];
        for (i, &v) in vertex_map.iter().enumerate() {
            local[v] = i;
        }
        let relabel = |s: &Vec<usize>| s.iter().map(|&v| local[v]).collect::<Vec<_>>();
        let top: Vec<Vec<usize>> = facets.iter().map(|&f| relabel(&parent.simplices[d - 1][f])).collect();

        // components via union-find over facet membership
        let nb = vertex_map.len();
        let mut uf = UnionFind::new(nb);
        for t in &top {
            for w in t.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut comp_id = HashMap::new();
        let vertex_component: Vec<usize> = (0..nb)
            .map(|v| {
                let r = uf.find(v);
                let next = comp_id.len();
                *comp_id.entry(r).or_insert(next)
            })
            .collect();
        let component_count = comp_id.len();

        let complex = if d == 1 {
            // boundary of a 1-complex is a set of points
            SimplicialComplex::points(nb)
        } else {
            let coords: Option<Vec<Vec<[f64; 3]>>> = parent
                .geometry
                .as_ref()
                .map(|_| facets.iter().map(|&f| parent.simplex_coordinates(d - 1, f).unwrap()).collect());
            SimplicialComplex::build_inner(&top, coords.as_deref(), false)?
        };
        let complex = complex.with_name(format!("{}/boundary", parent.name));
        let simplex_maps = (0..complex.dim.max(0) + 1)
            .map(|k| {
                if k >= parent.dim {
                    return Vec::new();
                }
                complex.simplices[k]
                    .iter()
                    .map(|s| {
                        let ps: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
                        parent.simplex_index(&ps).expect("boundary simplex in parent")
                    })
                    .collect()
            })
            .collect();
        Ok(BoundaryComplex { complex, vertex_map, simplex_maps, vertex_component, component_count })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    /// Parent index of each boundary k-simplex.
    pub fn simplex_map(&self, k: usize) -> &[usize] {
        &self.simplex_maps[k]
    }

    pub fn vertex_component(&self) -> &[usize] {
        &self.vertex_component
    }

    /// Parent vertices belonging to component `i`.
    pub fn component_vertices(&self, i: usize) -> Vec<usize> {
        self.vertex_map.iter().zip(&self.vertex_component).filter(|(_, &c)| c == i).map(|(&v, _)| v).collect()
    }

    /// Parent facets (boundary (dim−1)-simplices) of component `i`.
    pub fn component_facets(&self, i: usize) -> Vec<usize> {
        let top = self.complex.dim;
        self.complex.simplices[top]
            .iter()
            .zip(&self.simplex_maps[top])
            .filter(|(s, _)| self.vertex_component[s[0]] == i)
            .map(|(_, &p)| p)
            .collect()
    }
}

impl SimplicialComplex {
    /// A 0-dimensional complex of isolated points; only used as the boundary of 1-complexes.
    fn points(n: usize) -> Self {
        let simplices = vec![(0..n).map(|v| vec![v]).collect::<Vec<_>>()];
        let index = vec![(0..n).map(|v| (vec![v], v)).collect()];
        SimplicialComplex {
            name: String::from("points"),
            dim: 0,
            vertex_count: n,
            simplices,
            index,
            boundary: vec![CsrMatrix::zeros(0, n)],
            orientation: vec![1; n],
            facet_cofaces: Vec::new(),
            geometry: None,
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_binomial_count() {
        assert_eq!(subsets(&[0, 1, 2, 3], 2).len(), 6);
        assert_eq!(subsets(&[0, 1, 2], 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(&[4, 7], 1), vec![vec![4], vec![7]]);
    }

    #[test]
    fn single_triangle() {
        let m = SimplicialComplex::build(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(m.count(1), 3);
        assert_eq!(m.boundary_facets().len(), 3);
        assert_eq!(m.boundary_complex().unwrap().component_count(), 1);
        assert_eq!(m.betti_numbers(), vec![1, 0, 0]);
    }

    fn annulus_strip() -> Vec<Vec<usize>> {
        // inner 4-cycle 0..3, outer 4-cycle 4..7
        let mut t = Vec::new();
        for i in 0..4 {
            let j = (i + 1) % 4;
            t.push(vec![i, j, 4 + i]);
            t.push(vec![j, 4 + j, 4 + i]);
        }
        t
    }

    #[test]
    fn annulus_strip_has_two_boundary_components() {
        let m = SimplicialComplex::build(&annulus_strip()).unwrap();
        assert_eq!(m.count(2), 8);
        assert_eq!(m.vertex_count(), 8);
        let b = m.boundary_complex().unwrap();
        assert_eq!(b.component_count(), 2);
        assert_eq!(m.betti_numbers(), vec![1, 1, 0]);
    }

    #[test]
    fn mobius_strip_is_rejected() {
        // 5-vertex Möbius band
        let t = vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 0], vec![4, 0, 1]];
        assert_eq!(SimplicialComplex::build(&t).unwrap_err(), MeshError::OrientationFailure);
    }

    #[test]
    fn non_manifold_edge_is_rejected() {
        let t = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]];
        assert!(matches!(SimplicialComplex::build(&t), Err(MeshError::NonManifold { count: 3, .. })));
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let t = vec![vec![0, 1, 2], vec![3, 4, 5]];
        assert_eq!(SimplicialComplex::build(&t).unwrap_err(), MeshError::Disconnected(2));
    }

    #[test]
    fn gaps_in_vertex_range_are_rejected() {
        let t = vec![vec![0, 1, 3]];
        assert_eq!(SimplicialComplex::build(&t).unwrap_err(), MeshError::NonContiguousVertices(2));
    }

    #[test]
    fn closed_complex_has_no_boundary_complex() {
        // boundary of a tetrahedron
        let t = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        let m = SimplicialComplex::build(&t).unwrap();
        assert!(m.is_closed());
        assert_eq!(m.boundary_complex().unwrap_err(), MeshError::EmptyBoundary);
        assert_eq!(m.betti_numbers(), vec![1, 0, 1]);
    }

    #[test]
    fn orientation_cancels_on_interior_facets() {
        let m = SimplicialComplex::build(&annulus_strip()).unwrap();
        let fundamental: Vec<f64> = m.orientation().iter().map(|&s| s as f64).collect();
        let bd = m.boundary_matrix(2).mul_vec(&fundamental);
        let boundary: std::collections::HashSet<usize> = m.boundary_facets().into_iter().collect();
        for (e, v) in bd.iter().enumerate() {
            assert_eq!(v.abs() > 0.0, boundary.contains(&e), "edge {e}");
        }
    }
}
