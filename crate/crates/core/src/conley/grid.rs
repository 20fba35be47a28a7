//! Uniform cubical grids on a box in ℝⁿ (n ≤ 3) and sets of grid cells.

use serde::Serialize;

use super::ConleyError;

/// Axis-aligned box [lo, hi] split into `res[a]` equal cells along axis `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    res: Vec<usize>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, res: Vec<usize>) -> Result<Self, ConleyError> {
        let n = lo.len();
        if n == 0 || n > 3 || hi.len() != n || res.len() != n {
            return Err(ConleyError::BadGrid(format!("dimension {n} with {} upper bounds and {} resolutions", hi.len(), res.len())));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) || res.iter().any(|&r| r == 0) {
            return Err(ConleyError::BadGrid("empty box or zero resolution".into()));
        }
        let mut strides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * res[a + 1];
        }
        Ok(Grid { lo, hi, res, strides })
    }

    /// The cube [-r, r]ⁿ with `res` cells per axis.
    pub fn cube(n: usize, r: f64, res: usize) -> Result<Self, ConleyError> {
        Grid::new(vec![-r; n], vec![r; n], vec![res; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn resolution(&self) -> &[usize] {
        &self.res
    }

    pub fn cell_size(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.res[axis] as f64
    }

    pub fn cell_diameter(&self) -> f64 {
        (0..self.dim()).map(|a| self.cell_size(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn coords(&self, id: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| (id / self.strides[a]) % self.res[a]).collect()
    }

    pub fn id(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Cell id for signed coordinates, `None` outside the grid.
    pub fn id_checked(&self, coords: &[i64]) -> Option<usize> {
        let mut id = 0;
        for a in 0..self.dim() {
            if coords[a] < 0 || coords[a] as usize >= self.res[a] {
                return None;
            }
            id += coords[a] as usize * self.strides[a];
        }
        Some(id)
    }

    pub fn cell_lo(&self, id: usize) -> Vec<f64> {
        self.coords(id).iter().enumerate().map(|(a, &c)| self.lo[a] + c as f64 * self.cell_size(a)).collect()
    }

    pub fn center(&self, id: usize) -> Vec<f64> {
        self.coords(id).iter().enumerate().map(|(a, &c)| self.lo[a] + (c as f64 + 0.5) * self.cell_size(a)).collect()
    }

    /// The 2ⁿ corners of a cell.
    pub fn corners(&self, id: usize) -> Vec<Vec<f64>> {
        let lo = self.cell_lo(id);
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| (0..n).map(|a| lo[a] + if mask >> a & 1 == 1 { self.cell_size(a) } else { 0.0 }).collect())
            .collect()
    }

    /// Cell containing `x`, `None` outside the box.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut c = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            if x[a] < self.lo[a] || x[a] > self.hi[a] {
                return None;
            }
            let k = ((x[a] - self.lo[a]) / self.cell_size(a)).floor() as i64;
            c.push(k.min(self.res[a] as i64 - 1));
        }
        self.id_checked(&c)
    }

    /// Index range of cells along `axis` whose closure meets [a, b], clamped to the grid.
    pub(crate) fn axis_range(&self, axis: usize, a: f64, b: f64) -> Option<(usize, usize)> {
        let h = self.cell_size(axis);
        let lo = ((a - self.lo[axis]) / h).ceil() as i64 - 1;
        let hi = ((b - self.lo[axis]) / h).floor() as i64;
        let lo = lo.max(0);
        let hi = hi.min(self.res[axis] as i64 - 1);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// All cells whose closure meets the closed box [a, b].
    pub fn cells_meeting_box(&self, a: &[f64], b: &[f64]) -> Vec<usize> {
        let n = self.dim();
        let mut ranges = Vec::with_capacity(n);
        for ax in 0..n {
            match self.axis_range(ax, a[ax], b[ax]) {
                Some(r) => ranges.push(r),
                None => return Vec::new(),
            }
        }
        let mut out = Vec::new();
        let mut c: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        loop {
            out.push(self.id(&c));
            let mut ax = n;
            loop {
                if ax == 0 {
                    out.sort_unstable();
                    return out;
                }
                ax -= 1;
                if c[ax] < ranges[ax].1 {
                    c[ax] += 1;
                    break;
                }
                c[ax] = ranges[ax].0;
            }
        }
    }

    /// Cells sharing at least a corner with `id` (excluding `id`), and whether
    /// the cell touches the outer edge of the grid.
    pub fn neighbors(&self, id: usize) -> (Vec<usize>, bool) {
        let n = self.dim();
        let c = self.coords(id);
        let mut out = Vec::new();
        let mut on_edge = false;
        for code in 0..3usize.pow(n as u32) {
            let mut d = code;
            let mut nc = Vec::with_capacity(n);
            let mut zero = true;
            for a in 0..n {
                let off = (d % 3) as i64 - 1;
                d /= 3;
                zero &= off == 0;
                nc.push(c[a] as i64 + off);
            }
            if zero {
                continue;
            }
            match self.id_checked(&nc) {
                Some(j) => out.push(j),
                None => on_edge = true,
            }
        }
        (out, on_edge)
    }

    /// All cells whose centre lies in the closed ball of radius `r` about the origin.
    pub fn ball(&self, r: f64) -> CellSet {
        CellSet::from_iter((0..self.len()).filter(|&c| self.center(c).iter().map(|x| x * x).sum::<f64>() <= r * r))
    }

    pub fn all(&self) -> CellSet {
        CellSet::from_iter(0..self.len())
    }

    /// Cells whose centre satisfies `pred`.
    pub fn select(&self, pred: impl Fn(&[f64]) -> bool) -> CellSet {
        CellSet::from_iter((0..self.len()).filter(|&c| pred(&self.center(c))))
    }
}

/// A sorted set of cell ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CellSet(Vec<usize>);

impl FromIterator<usize> for CellSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        CellSet(v)
    }
}

impl CellSet {
    pub fn new() -> Self {
        CellSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        CellSet(self.0.iter().copied().filter(|&c| other.contains(c)).collect())
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        CellSet(self.0.iter().copied().filter(|&c| !other.contains(c)).collect())
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.iter().all(|c| !other.contains(c))
    }

    /// Membership mask over a grid with `n` cells.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for c in self.iter() {
            m[c] = true;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        let g = Grid::new(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0], vec![2, 3, 4]).unwrap();
        assert_eq!(g.len(), 24);
        for id in 0..g.len() {
            assert_eq!(g.id(&g.coords(id)), id);
        }
        assert_eq!(g.locate(&[0.99, 1.99, 2.99]), Some(23));
        assert_eq!(g.locate(&[1.5, 0.0, 0.0]), None);
    }

    #[test]
    fn closed_box_hits_touching_cells() {
        let g = Grid::cube(1, 1.0, 4).unwrap();
        // cells [-1,-.5], [-.5,0], [0,.5], [.5,1]; the point 0 touches two cells
        assert_eq!(g.cells_meeting_box(&[0.0], &[0.0]), vec![1, 2]);
        assert_eq!(g.cells_meeting_box(&[2.0], &[3.0]), Vec::<usize>::new());
        assert_eq!(g.cells_meeting_box(&[-5.0], &[5.0]), vec![0, 1, 2, 3]);
    }

    #[test]
    fn neighbours_and_edges() {
        let g = Grid::cube(2, 1.0, 4).unwrap();
        let (nb, edge) = g.neighbors(g.id(&[1, 1]));
        assert_eq!(nb.len(), 8);
        assert!(!edge);
        let (nb, edge) = g.neighbors(0);
        assert_eq!(nb.len(), 3);
        assert!(edge);
    }

    #[test]
    fn set_algebra() {
        let a: CellSet = [3, 1, 2, 2].into_iter().collect();
        let b: CellSet = [2, 5].into_iter().collect();
        assert_eq!(a.as_slice(), &[1, 2, 3]);
        assert_eq!(a.union(&b).as_slice(), &[1, 2, 3, 5]);
        assert_eq!(a.intersection(&b).as_slice(), &[2]);
        assert_eq!(a.difference(&b).as_slice(), &[1, 3]);
        assert!(!a.is_disjoint(&b));
        assert!(CellSet::new().is_subset(&a));
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(Grid::new(vec![0.0; 4], vec![1.0; 4], vec![2; 4]).is_err());
        assert!(Grid::new(vec![1.0], vec![0.0], vec![2]).is_err());
    }
}
