//! Relative cubical homology of pairs of cell sets over GF(p), with homology
//! coordinates for computing induced maps.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::grid::{CellSet, Grid};
use super::ConleyError;

/// The field characteristic, 2³¹ − 1.
pub const PRIME: u64 = 2_147_483_647;

pub(crate) fn add_mod(a: u64, b: u64) -> u64 {
    (a + b) % PRIME
}

pub(crate) fn mul_mod(a: u64, b: u64) -> u64 {
    a * b % PRIME
}

pub(crate) fn neg_mod(a: u64) -> u64 {
    (PRIME - a % PRIME) % PRIME
}

pub(crate) fn inv_mod(a: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % PRIME, PRIME - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Signed representative in (−p/2, p/2].
pub fn to_signed(a: u64) -> i64 {
    if a > PRIME / 2 {
        a as i64 - PRIME as i64
    } else {
        a as i64
    }
}

pub fn from_signed(a: i64) -> u64 {
    a.rem_euclid(PRIME as i64) as u64
}

/// Sparse chain: (basis index, coefficient) sorted by index, no zeros.
pub type Chain = Vec<(usize, u64)>;

/// a + f·b.
fn add_scaled(a: &Chain, b: &Chain, f: u64) -> Chain {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, mul_mod(f, b[j].1)));
            j += 1;
        } else {
            let v = add_mod(a[i].1, mul_mod(f, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Elementary cube in doubled coordinates: odd entries are unit intervals,
/// even entries are points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    dim: u8,
    coords: [i32; 3],
}

impl Cube {
    fn new(coords: [i32; 3], n: usize) -> Self {
        let dim = coords[..n].iter().filter(|c| c.rem_euclid(2) == 1).count() as u8;
        Cube { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> [i32; 3] {
        self.coords
    }

    /// Faces with the sign of the cubical boundary.
    fn faces(&self, n: usize) -> Vec<(Cube, i64)> {
        let mut out = Vec::with_capacity(2 * self.dim());
        let mut seen = 0;
        for a in 0..n {
            if self.coords[a].rem_euclid(2) == 1 {
                let sign = if seen % 2 == 0 { 1 } else { -1 };
                let mut lo = self.coords;
                lo[a] -= 1;
                let mut hi = self.coords;
                hi[a] += 1;
                out.push((Cube::new(lo, n), -sign));
                out.push((Cube::new(hi, n), sign));
                seen += 1;
            }
        }
        out
    }

    /// The lowest vertex of the cube.
    pub fn base_vertex(&self, n: usize) -> Cube {
        let mut c = self.coords;
        for x in c.iter_mut().take(n) {
            if x.rem_euclid(2) == 1 {
                *x -= 1;
            }
        }
        Cube::new(c, n)
    }
}

/// Top cube of a grid cell.
pub fn cell_cube(grid: &Grid, cell: usize) -> Cube {
    let n = grid.dim();
    let mut c = [0i32; 3];
    for (a, k) in grid.coords(cell).into_iter().enumerate() {
        c[a] = 2 * k as i32 + 1;
    }
    Cube::new(c, n)
}

/// All faces of the closed cells.
pub fn closure(grid: &Grid, cells: &CellSet) -> BTreeSet<Cube> {
    let n = grid.dim();
    let mut out = BTreeSet::new();
    let mut stack: Vec<Cube> = cells.iter().map(|c| cell_cube(grid, c)).collect();
    while let Some(q) = stack.pop() {
        if out.insert(q) {
            for (f, _) in q.faces(n) {
                if !out.contains(&f) {
                    stack.push(f);
                }
            }
        }
    }
    out
}

/// Chain complex C(N̄)/C(L̄) with cubes ordered by dimension.
#[derive(Debug, Clone)]
pub struct RelativeComplex {
    n: usize,
    cubes: Vec<Cube>,
    index: HashMap<Cube, usize>,
    support: HashSet<Cube>,
}

impl RelativeComplex {
    pub fn new(grid: &Grid, n_set: &CellSet, l_set: &CellSet) -> Self {
        let nbar = closure(grid, n_set);
        let lbar = closure(grid, l_set);
        let mut cubes: Vec<Cube> = nbar.difference(&lbar).copied().collect();
        cubes.sort();
        let index = cubes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        RelativeComplex { n: grid.dim(), cubes, index, support: nbar.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn index_of(&self, c: &Cube) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Whether the cube lies in the closure of N.
    pub fn supports(&self, c: &Cube) -> bool {
        self.support.contains(c)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    fn boundary(&self, j: usize) -> Chain {
        let mut col: Chain = self.cubes[j]
            .faces(self.n)
            .into_iter()
            .filter_map(|(f, s)| self.index.get(&f).map(|&i| (i, from_signed(s))))
            .collect();
        col.sort_unstable();
        col
    }
}

/// Reduced boundary matrix of a relative complex.
#[derive(Debug, Clone)]
pub struct PairHomology {
    complex: RelativeComplex,
    r: Vec<Chain>,
    v: Vec<Chain>,
    pivot_of_low: HashMap<usize, usize>,
    essential: Vec<Vec<usize>>,
}

impl PairHomology {
    pub fn compute(complex: RelativeComplex) -> Self {
        let m = complex.len();
        let mut r: Vec<Chain> = Vec::with_capacity(m);
        let mut v: Vec<Chain> = Vec::with_capacity(m);
        let mut pivot_of_low: HashMap<usize, usize> = HashMap::new();
        for j in 0..m {
            let mut col = complex.boundary(j);
            let mut vj: Chain = vec![(j, 1)];
            while let Some(&(low, val)) = col.last() {
                match pivot_of_low.get(&low) {
                    Some(&k) => {
                        let f = neg_mod(mul_mod(val, inv_mod(r[k].last().unwrap().1)));
                        col = add_scaled(&col, &r[k], f);
                        vj = add_scaled(&vj, &v[k], f);
                    }
                    None => break,
                }
            }
            if let Some(&(low, _)) = col.last() {
                pivot_of_low.insert(low, j);
            }
            r.push(col);
            v.push(vj);
        }
        let mut essential = vec![Vec::new(); complex.ambient_dim() + 1];
        for j in 0..m {
            if r[j].is_empty() && !pivot_of_low.contains_key(&j) {
                essential[complex.cubes[j].dim()].push(j);
            }
        }
        PairHomology { complex, r, v, pivot_of_low, essential }
    }

    pub fn complex(&self) -> &RelativeComplex {
        &self.complex
    }

    /// Betti numbers in degrees 0..=n.
    pub fn betti(&self) -> Vec<usize> {
        self.essential.iter().map(Vec::len).collect()
    }

    /// Cycle representing the k-th basis class in degree `dim`.
    pub fn representative(&self, dim: usize, k: usize) -> &Chain {
        &self.v[self.essential[dim][k]]
    }

    /// Coordinates of a relative cycle in the homology basis of its degree.
    pub fn coordinates(&self, chain: &Chain, dim: usize) -> Result<Vec<u64>, ConleyError> {
        let mut z = chain.clone();
        let mut coef = vec![0u64; self.essential[dim].len()];
        while let Some(&(low, val)) = z.last() {
            if let Some(&k) = self.pivot_of_low.get(&low) {
                let f = neg_mod(mul_mod(val, inv_mod(self.r[k].last().unwrap().1)));
                z = add_scaled(&z, &self.r[k], f);
            } else if let Ok(pos) = self.essential[dim].binary_search(&low) {
                coef[pos] = add_mod(coef[pos], val);
                z = add_scaled(&z, &self.v[low], neg_mod(val));
            } else {
                return Err(ConleyError::NotACycle);
            }
        }
        Ok(coef)
    }
}

/// Dense matrix over GF(p), row-major.
pub type ModMatrix = Vec<Vec<u64>>;

impl PairHomology {
    /// Per-degree matrices of the map H(self) → H(target) induced by a cube
    /// map; `None` sends a cube to zero.
    pub fn induced_matrices(
        &self,
        target: &PairHomology,
        map: impl Fn(&Cube) -> Option<Cube>,
    ) -> Result<Vec<ModMatrix>, ConleyError> {
        let dims = self.essential.len().min(target.essential.len());
        let mut out = Vec::with_capacity(dims);
        for k in 0..dims {
            let mut m = vec![vec![0u64; self.essential[k].len()]; target.essential[k].len()];
            for col in 0..self.essential[k].len() {
                let mut image: Chain = Vec::new();
                let mut outside = 0;
                for &(i, v) in self.representative(k, col) {
                    let Some(q) = map(&self.complex.cubes[i]) else { continue };
                    match target.complex.index_of(&q) {
                        Some(j) => image.push((j, v)),
                        None if target.complex.supports(&q) => {}
                        None => outside += 1,
                    }
                }
                if outside > 0 {
                    return Err(ConleyError::MapOutsidePair(outside));
                }
                image.sort_unstable();
                let mut merged: Chain = Vec::with_capacity(image.len());
                for (j, v) in image {
                    match merged.last_mut() {
                        Some(last) if last.0 == j => last.1 = add_mod(last.1, v),
                        _ => merged.push((j, v)),
                    }
                }
                merged.retain(|e| e.1 != 0);
                let coords = target.coordinates(&merged, k)?;
                for (row, c) in coords.into_iter().enumerate() {
                    m[row][col] = c;
                }
            }
            out.push(m);
        }
        Ok(out)
    }
}

/// Product of a (·×inner) and b (inner×cols).
pub fn mat_mul(a: &ModMatrix, b: &ModMatrix, inner: usize, cols: usize) -> ModMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(0u64, |acc, k| add_mod(acc, mul_mod(row[k], b[k][j]))))
                .collect()
        })
        .collect()
}

/// Inverse of a square matrix, or `None` if singular.
pub fn mat_inverse(a: &ModMatrix) -> Option<ModMatrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| m[i][c] != 0)?;
        m.swap(c, p);
        let inv = inv_mod(m[c][c]);
        for x in m[c].iter_mut() {
            *x = mul_mod(*x, inv);
        }
        for i in 0..n {
            if i != c && m[i][c] != 0 {
                let f = neg_mod(m[i][c]);
                for j in 0..2 * n {
                    m[i][j] = add_mod(m[i][j], mul_mod(f, m[c][j]));
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rank over GF(p).
pub fn mat_rank(a: &ModMatrix) -> usize {
    let mut m = a.clone();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = inv_mod(m[r][c]);
        for i in r + 1..m.len() {
            if m[i][c] != 0 {
                let f = neg_mod(mul_mod(m[i][c], inv));
                for j in c..cols {
                    m[i][j] = add_mod(m[i][j], mul_mod(f, m[r][j]));
                }
            }
        }
        r += 1;
    }
    r
}

pub fn signed_matrix(a: &ModMatrix) -> Vec<Vec<i64>> {
    a.iter().map(|r| r.iter().map(|&x| to_signed(x)).collect()).collect()
}

/// Relative Betti ranks of (N, L); with L = ∅ this is the absolute homology of N.
pub fn relative_homology(grid: &Grid, n_set: &CellSet, l_set: &CellSet) -> Vec<usize> {
    PairHomology::compute(RelativeComplex::new(grid, n_set, l_set)).betti()
}
