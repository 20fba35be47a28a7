//! Structured mesh catalogue addressable as `name:resolution`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::{MeshError, SimplicialComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Disk,
    Annulus,
    PairOfPants,
    SolidTorus,
    Torus3,
    Torus2,
    Circle,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Disk => "disk",
            GeneratorKind::Annulus => "annulus",
            GeneratorKind::PairOfPants => "pair-of-pants",
            GeneratorKind::SolidTorus => "solid-torus",
            GeneratorKind::Torus3 => "torus3",
            GeneratorKind::Torus2 => "torus2",
            GeneratorKind::Circle => "circle",
        }
    }

    pub fn default_resolution(self) -> usize {
        match self {
            GeneratorKind::Disk | GeneratorKind::Annulus | GeneratorKind::Circle => 16,
            GeneratorKind::PairOfPants => 12,
            GeneratorKind::SolidTorus | GeneratorKind::Torus3 => 3,
            GeneratorKind::Torus2 => 8,
        }
    }

    fn min_resolution(self) -> usize {
        match self {
            GeneratorKind::Disk => 1,
            GeneratorKind::PairOfPants => 4,
            GeneratorKind::Annulus | GeneratorKind::SolidTorus | GeneratorKind::Torus3 | GeneratorKind::Torus2 | GeneratorKind::Circle => 3,
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "disk" => GeneratorKind::Disk,
            "annulus" => GeneratorKind::Annulus,
            "pair-of-pants" | "pants" => GeneratorKind::PairOfPants,
            "solid-torus" => GeneratorKind::SolidTorus,
            "torus3" | "3-torus" => GeneratorKind::Torus3,
            "torus2" | "2-torus" => GeneratorKind::Torus2,
            "circle" => GeneratorKind::Circle,
            other => return Err(MeshError::UnknownGenerator(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub resolution: usize,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, resolution: usize) -> Self {
        GeneratorSpec { kind, resolution }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.resolution)
    }
}

/// Parses `name` or `name:resolution`.
pub fn parse_generator(s: &str) -> Result<GeneratorSpec, MeshError> {
    let (name, res) = match s.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (s, None),
    };
    let kind: GeneratorKind = name.parse()?;
    let resolution = match res {
        Some(r) => r.trim().parse::<usize>().map_err(|e| MeshError::Parse(format!("resolution `{r}`: {e}")))?,
        None => kind.default_resolution(),
    };
    Ok(GeneratorSpec { kind, resolution })
}

/// Meshes with nonempty boundary used by the decomposition checks, followed by
/// the closed 3-torus.
pub fn catalogue() -> Vec<GeneratorSpec> {
    [GeneratorKind::Disk, GeneratorKind::Annulus, GeneratorKind::PairOfPants, GeneratorKind::SolidTorus, GeneratorKind::Torus3]
        .into_iter()
        .map(|k| GeneratorSpec::new(k, k.default_resolution()))
        .collect()
}

pub fn generate(spec: &GeneratorSpec) -> Result<SimplicialComplex, MeshError> {
    let n = spec.resolution;
    if n < spec.kind.min_resolution() {
        return Err(MeshError::Parse(format!(
            "{} needs resolution at least {}",
            spec.kind.name(),
            spec.kind.min_resolution()
        )));
    }
    let mesh = match spec.kind {
        GeneratorKind::Disk => hex_region(n, &[])?,
        GeneratorKind::PairOfPants => {
            let r = (n / 4).max(1) as i64;
            let c = (n / 2) as i64;
            hex_region(n, &[((-c, 0), r), ((c, 0), r)])?
        }
        GeneratorKind::Annulus => annulus(n)?,
        GeneratorKind::SolidTorus => freudenthal3(n, [false, false, true])?,
        GeneratorKind::Torus3 => freudenthal3(n, [true, true, true])?,
        GeneratorKind::Torus2 => torus2(n)?,
        GeneratorKind::Circle => circle(n)?,
    };
    Ok(mesh.with_name(spec.to_string()))
}

fn hex_distance(q: i64, r: i64) -> i64 {
    q.abs().max(r.abs()).max((q + r).abs())
}

/// Equilateral triangles of a hexagon of radius `n` (unit circumradius after
/// scaling), minus hexagonal holes given by axial centre and radius.
fn hex_region(n: usize, holes: &[((i64, i64), i64)]) -> Result<SimplicialComplex, MeshError> {
    let n = n as i64;
    let inside = |q: i64, r: i64| hex_distance(q, r) <= n;
    let in_hole = |q: i64, r: i64| holes.iter().any(|&((cq, cr), rad)| hex_distance(q - cq, r - cr) <= rad);
    let mut tris: Vec<[(i64, i64); 3]> = Vec::new();
    for q in -n..=n {
        for r in -n..=n {
            let up = [(q, r), (q + 1, r), (q, r + 1)];
            let down = [(q + 1, r), (q + 1, r + 1), (q, r + 1)];
            for t in [up, down] {
                if t.iter().all(|&(a, b)| inside(a, b)) && !t.iter().all(|&(a, b)| in_hole(a, b)) {
                    tris.push(t);
                }
            }
        }
    }
    let mut ids = std::collections::BTreeMap::new();
    for t in &tris {
        for &v in t {
            let next = ids.len();
            ids.entry(v).or_insert(next);
        }
    }
    let mut positions = vec![[0.0; 3]; ids.len()];
    let scale = 1.0 / n as f64;
    for (&(q, r), &id) in &ids {
        positions[id] = [(q as f64 + r as f64 / 2.0) * scale, r as f64 * 3f64.sqrt() / 2.0 * scale, 0.0];
    }
    let top: Vec<Vec<usize>> = tris.iter().map(|t| t.iter().map(|v| ids[v]).collect()).collect();
    SimplicialComplex::build_with_positions(&top, &positions)
}

/// Annulus 1 ≤ r ≤ 2 with `n` points per ring and staggered rings.
fn annulus(n: usize) -> Result<SimplicialComplex, MeshError> {
    let row_height = 3f64.sqrt() / 2.0 * 2.0 * PI * 1.5 / n as f64;
    let layers = ((1.0 / row_height).round() as usize).max(2);
    let id = |ring: usize, i: usize| ring * n + i % n;
    let mut positions = Vec::with_capacity((layers + 1) * n);
    for ring in 0..=layers {
        let rad = 1.0 + ring as f64 / layers as f64;
        for i in 0..n {
            let theta = 2.0 * PI * (i as f64 + ring as f64 / 2.0) / n as f64;
            positions.push([rad * theta.cos(), rad * theta.sin(), 0.0]);
        }
    }
    let mut top = Vec::with_capacity(2 * n * layers);
    for ring in 0..layers {
        for i in 0..n {
            top.push(vec![id(ring, i), id(ring, i + 1), id(ring + 1, i)]);
            top.push(vec![id(ring + 1, i), id(ring, i + 1), id(ring + 1, i + 1)]);
        }
    }
    SimplicialComplex::build_with_positions(&top, &positions)
}

/// Freudenthal (Kuhn) subdivision of an n×n×n block of unit cubes; `periodic[a]`
/// identifies the two faces normal to axis `a`.
fn freudenthal3(n: usize, periodic: [bool; 3]) -> Result<SimplicialComplex, MeshError> {
    let extent: Vec<usize> = periodic.iter().map(|&p| if p { n } else { n + 1 }).collect();
    let id = |c: [usize; 3]| {
        let w: Vec<usize> = (0..3).map(|a| if periodic[a] { c[a] % n } else { c[a] }).collect();
        (w[0] * extent[1] + w[1]) * extent[2] + w[2]
    };
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let h = 1.0 / n as f64;
    let mut top = Vec::with_capacity(6 * n * n * n);
    let mut coords = Vec::with_capacity(6 * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for p in PERMS {
                    let mut c = [i, j, k];
                    let mut verts = vec![id(c)];
                    let mut xyz = vec![[i as f64 * h, j as f64 * h, k as f64 * h]];
                    for &axis in &p {
                        c[axis] += 1;
                        verts.push(id(c));
                        xyz.push([c[0] as f64 * h, c[1] as f64 * h, c[2] as f64 * h]);
                    }
                    top.push(verts);
                    coords.push(xyz);
                }
            }
        }
    }
    SimplicialComplex::build_with_geometry(&top, &coords)
}

/// Flat 2-torus: n×n unit squares, each split along its main diagonal.
fn torus2(n: usize) -> Result<SimplicialComplex, MeshError> {
    let id = |i: usize, j: usize| (i % n) * n + j % n;
    let h = 1.0 / n as f64;
    let mut top = Vec::with_capacity(2 * n * n);
    let mut coords = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let p = |a: usize, b: usize| [a as f64 * h, b as f64 * h, 0.0];
            top.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            coords.push(vec![p(i, j), p(i + 1, j), p(i + 1, j + 1)]);
            top.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            coords.push(vec![p(i, j), p(i + 1, j + 1), p(i, j + 1)]);
        }
    }
    SimplicialComplex::build_with_geometry(&top, &coords)
}

/// Cycle graph on `n` vertices with total length 2π.
fn circle(n: usize) -> Result<SimplicialComplex, MeshError> {
    let h = 2.0 * PI / n as f64;
    let top: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let coords: Vec<Vec<[f64; 3]>> = (0..n).map(|_| vec![[0.0; 3], [h, 0.0, 0.0]]).collect();
    SimplicialComplex::build_with_geometry(&top, &coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(s: &str) -> SimplicialComplex {
        generate(&parse_generator(s).unwrap()).unwrap()
    }

    #[test]
    fn parses_names_and_defaults() {
        assert_eq!(parse_generator("annulus:16").unwrap(), GeneratorSpec::new(GeneratorKind::Annulus, 16));
        assert_eq!(parse_generator("pants").unwrap().resolution, 12);
        assert!(matches!(parse_generator("sphere:3"), Err(MeshError::UnknownGenerator(_))));
        assert!(matches!(parse_generator("disk:x"), Err(MeshError::Parse(_))));
    }

    #[test]
    fn disk_is_a_disk() {
        let m = gen("disk:4");
        assert_eq!(m.vertex_count(), 1 + 3 * 4 * 5);
        assert_eq!(m.betti_numbers(), vec![1, 0, 0]);
        assert_eq!(m.boundary_complex().unwrap().component_count(), 1);
    }

    #[test]
    fn annulus_has_two_boundary_circles() {
        let m = gen("annulus:16");
        assert_eq!(m.betti_numbers(), vec![1, 1, 0]);
        let b = m.boundary_complex().unwrap();
        assert_eq!(b.component_count(), 2);
    }

    #[test]
    fn pants_has_three_boundary_circles() {
        let m = gen("pair-of-pants:12");
        assert_eq!(m.betti_numbers(), vec![1, 2, 0]);
        assert_eq!(m.boundary_complex().unwrap().component_count(), 3);
    }

    #[test]
    fn solid_torus_boundary_is_a_torus() {
        let m = gen("solid-torus:3");
        assert_eq!(m.betti_numbers(), vec![1, 1, 0, 0]);
        let b = m.boundary_complex().unwrap();
        assert_eq!(b.component_count(), 1);
        assert_eq!(b.complex().euler_characteristic(), 0);
        assert_eq!(b.complex().betti_numbers(), vec![1, 2, 1]);
    }

    #[test]
    fn closed_tori() {
        assert_eq!(gen("torus3:3").betti_numbers(), vec![1, 3, 3, 1]);
        assert_eq!(gen("torus2:4").betti_numbers(), vec![1, 2, 1]);
        assert_eq!(gen("circle:5").betti_numbers(), vec![1, 1]);
        assert!(gen("torus3:3").is_closed());
    }

    #[test]
    fn names_round_trip() {
        for spec in catalogue() {
            assert_eq!(parse_generator(&spec.to_string()).unwrap(), spec);
        }
    }
}
