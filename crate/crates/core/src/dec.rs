//! Discrete exterior calculus on a [`SimplicialComplex`]: cochains, the
//! exterior derivative, diagonal Hodge stars, codifferential and tangential trace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CsrMatrix;
use crate::mesh::{subsets, BoundaryComplex, MeshError, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecError {
    #[error("exterior derivative of a degree-{degree} cochain on a {dim}-complex")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("codifferential of a 0-cochain")]
    DegreeUnderflow,
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("cochain has {found} values, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cochains live on different complexes (`{left}` vs `{right}`)")]
    ParentMismatch { left: String, right: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("cochain json: {0}")]
    Json(String),
}

/// A real value per oriented k-simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<f64>,
    pub mesh_id: String,
}

impl Cochain {
    pub fn new(complex: &SimplicialComplex, degree: usize, values: Vec<f64>) -> Result<Self, DecError> {
        let expected = complex.count(degree);
        if degree > complex.dim() || values.len() != expected {
            return Err(DecError::LengthMismatch { expected, found: values.len() });
        }
        Ok(Cochain { degree, values, mesh_id: complex.name().to_string() })
    }

    pub fn zeros(complex: &SimplicialComplex, degree: usize) -> Self {
        Cochain { degree, values: vec![0.0; complex.count(degree)], mesh_id: complex.name().to_string() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("cochain serializes")
    }

    /// Parses a cochain and checks it against `complex`.
    pub fn from_json(text: &str, complex: &SimplicialComplex) -> Result<Self, DecError> {
        let c: Cochain = serde_json::from_str(text).map_err(|e| DecError::Json(e.to_string()))?;
        let expected = complex.count(c.degree);
        if c.values.len() != expected {
            return Err(DecError::LengthMismatch { expected, found: c.values.len() });
        }
        Ok(c)
    }

    fn combine(&self, other: &Cochain, a: f64, b: f64) -> Cochain {
        Cochain {
            degree: self.degree,
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
            mesh_id: self.mesh_id.clone(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.combine(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.combine(other, 1.0, -1.0)
    }

    pub fn scaled(&self, s: f64) -> Cochain {
        Cochain { degree: self.degree, values: self.values.iter().map(|x| s * x).collect(), mesh_id: self.mesh_id.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarKind {
    /// Circumcentric duals on a well-centred triangle mesh (cotangent weights).
    Circumcentric,
    /// Each top simplex shares its volume equally among its k-faces.
    VolumeShare,
    /// Unit weights; used when the complex carries no coordinates.
    Combinatorial,
}

/// Diagonal Hodge stars ⋆_0..⋆_dim, all strictly positive.
#[derive(Debug, Clone)]
pub struct InnerProductStructure {
    kind: StarKind,
    weights: Vec<Vec<f64>>,
}

impl InnerProductStructure {
    pub fn for_complex(m: &SimplicialComplex) -> Self {
        if m.geometry().is_none() || m.dim() == 0 {
            return Self::combinatorial(m);
        }
        if m.dim() == 2 {
            if let Some(w) = circumcentric_2d(m) {
                return InnerProductStructure { kind: StarKind::Circumcentric, weights: w };
            }
        }
        InnerProductStructure { kind: StarKind::VolumeShare, weights: volume_share(m) }
    }

    pub fn combinatorial(m: &SimplicialComplex) -> Self {
        InnerProductStructure {
            kind: StarKind::Combinatorial,
            weights: (0..=m.dim()).map(|k| vec![1.0; m.count(k)]).collect(),
        }
    }

    pub fn kind(&self) -> StarKind {
        self.kind
    }

    pub fn weights(&self, k: usize) -> &[f64] {
        &self.weights[k]
    }
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross_norm(a: [f64; 3], b: [f64; 3]) -> f64 {
    let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    dot3(c, c).sqrt()
}

/// k-dimensional volume of the simplex spanned by `p`.
pub fn simplex_volume(p: &[[f64; 3]]) -> f64 {
    let k = p.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let v: Vec<[f64; 3]> = p[1..].iter().map(|&q| sub3(q, p[0])).collect();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| dot3(v[i], v[j]));
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    gram.determinant().max(0.0).sqrt() / fact
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn volume_share(m: &SimplicialComplex) -> Vec<Vec<f64>> {
    let d = m.dim();
    let geom = m.geometry().expect("geometry present");
    let mut weights = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut acc = vec![0.0; m.count(k)];
        let mut size = vec![0.0; m.count(k)];
        for (t, verts) in m.simplices(d).iter().enumerate() {
            let vol_t = simplex_volume(&geom[t]);
            for f in subsets(verts, k + 1) {
                let idx = m.simplex_index(&f).expect("face present");
                acc[idx] += vol_t / binomial(d + 1, k + 1);
                if size[idx] == 0.0 {
                    let pts: Vec<[f64; 3]> = f.iter().map(|v| geom[t][verts.iter().position(|w| w == v).unwrap()]).collect();
                    size[idx] = simplex_volume(&pts);
                }
            }
        }
        let c = binomial(d, k);
        weights.push(acc.iter().zip(&size).map(|(a, s)| c * a / (s * s)).collect());
    }
    weights
}

/// Cotangent stars; `None` if some weight is not strictly positive.
fn circumcentric_2d(m: &SimplicialComplex) -> Option<Vec<Vec<f64>>> {
    let geom = m.geometry()?;
    let mut w0 = vec![0.0; m.count(0)];
    let mut w1 = vec![0.0; m.count(1)];
    let mut w2 = vec![0.0; m.count(2)];
    for (t, verts) in m.simplices(2).iter().enumerate() {
        let p = &geom[t];
        let area = 0.5 * cross_norm(sub3(p[1], p[0]), sub3(p[2], p[0]));
        if area <= 0.0 {
            return None;
        }
        w2[t] = 1.0 / area;
        let mut cot = [0.0; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let a = sub3(p[j], p[i]);
            let b = sub3(p[k], p[i]);
            cot[i] = dot3(a, b) / cross_norm(a, b);
        }
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let e = m.simplex_index(&[verts[j], verts[k]]).expect("edge present");
            w1[e] += cot[i] / 2.0;
            let lij = dot3(sub3(p[j], p[i]), sub3(p[j], p[i]));
            let lik = dot3(sub3(p[k], p[i]), sub3(p[k], p[i]));
            w0[verts[i]] += (cot[k] * lij + cot[j] * lik) / 8.0;
        }
    }
    let scale = w1.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if w1.iter().chain(&w0).any(|&w| w <= 1e-10 * scale.max(1e-300)) {
        return None;
    }
    Some(vec![w0, w1, w2])
}

/// Operators of discrete exterior calculus bound to one complex.
#[derive(Debug, Clone)]
pub struct Dec<'a> {
    complex: &'a SimplicialComplex,
    star: InnerProductStructure,
    d: Vec<CsrMatrix>,
}

impl<'a> Dec<'a> {
    pub fn new(complex: &'a SimplicialComplex) -> Self {
        Self::with_star(complex, InnerProductStructure::for_complex(complex))
    }

    pub fn with_star(complex: &'a SimplicialComplex, star: InnerProductStructure) -> Self {
        let d = (0..complex.dim()).map(|k| complex.coboundary_matrix(k)).collect();
        Dec { complex, star, d }
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.complex
    }

    pub fn star(&self) -> &InnerProductStructure {
        &self.star
    }

    pub fn weights(&self, k: usize) -> &[f64] {
        self.star.weights(k)
    }

    /// d_k : C^k → C^{k+1}.
    pub fn d(&self, k: usize) -> &CsrMatrix {
        &self.d[k]
    }

    fn check(&self, x: &Cochain) -> Result<(), DecError> {
        if x.mesh_id != self.complex.name() {
            return Err(DecError::ParentMismatch { left: x.mesh_id.clone(), right: self.complex.name().to_string() });
        }
        let expected = self.complex.count(x.degree);
        if x.values.len() != expected {
            return Err(DecError::LengthMismatch { expected, found: x.values.len() });
        }
        Ok(())
    }

    pub fn exterior_derivative(&self, x: &Cochain) -> Result<Cochain, DecError> {
        self.check(x)?;
        if x.degree >= self.complex.dim() {
            return Err(DecError::DegreeOverflow { degree: x.degree, dim: self.complex.dim() });
        }
        Ok(Cochain { degree: x.degree + 1, values: self.d[x.degree].mul_vec(&x.values), mesh_id: x.mesh_id.clone() })
    }

    pub fn inner_product(&self, x: &Cochain, y: &Cochain) -> Result<f64, DecError> {
        self.check(x)?;
        self.check(y)?;
        if x.degree != y.degree {
            return Err(DecError::DegreeMismatch { left: x.degree, right: y.degree });
        }
        Ok(weighted_dot(self.weights(x.degree), &x.values, &y.values))
    }

    /// d* = ⋆_k⁻¹ d_kᵀ ⋆_{k+1}.
    pub fn codifferential(&self, y: &Cochain) -> Result<Cochain, DecError> {
        self.check(y)?;
        if y.degree == 0 {
            return Err(DecError::DegreeUnderflow);
        }
        Ok(Cochain { degree: y.degree - 1, values: self.codifferential_values(y.degree - 1, &y.values), mesh_id: y.mesh_id.clone() })
    }

    /// d*_k applied to raw values of a (k+1)-cochain.
    pub fn codifferential_values(&self, k: usize, y: &[f64]) -> Vec<f64> {
        let wy: Vec<f64> = y.iter().zip(self.weights(k + 1)).map(|(a, w)| a * w).collect();
        self.d[k].tr_mul_vec(&wy).iter().zip(self.weights(k)).map(|(a, w)| a / w).collect()
    }

    /// dᵀ⋆_{k+1}y without the ⋆_k⁻¹ factor (the weak divergence).
    pub fn weak_codifferential(&self, k: usize, y: &[f64]) -> Vec<f64> {
        let wy: Vec<f64> = y.iter().zip(self.weights(k + 1)).map(|(a, w)| a * w).collect();
        self.d[k].tr_mul_vec(&wy)
    }

    /// Stiffness matrix d_kᵀ ⋆_{k+1} d_k.
    pub fn stiffness(&self, k: usize) -> CsrMatrix {
        let d = &self.d[k];
        d.transpose().matmul(&d.scale(Some(self.weights(k + 1)), None))
    }

    /// Restriction of a k-cochain to the boundary k-simplices.
    pub fn tangential_trace(&self, x: &Cochain, boundary: &BoundaryComplex) -> Result<Cochain, DecError> {
        self.check(x)?;
        if x.degree >= self.complex.dim() {
            return Err(DecError::DegreeOverflow { degree: x.degree, dim: self.complex.dim() - 1 });
        }
        let values = boundary.simplex_map(x.degree).iter().map(|&i| x.values[i]).collect();
        Ok(Cochain { degree: x.degree, values, mesh_id: boundary.complex().name().to_string() })
    }
}

pub fn weighted_dot(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    w.iter().zip(x).zip(y).map(|((w, a), b)| w * a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, parse_generator};
    use approx::assert_relative_eq;

    fn gen(s: &str) -> SimplicialComplex {
        generate(&parse_generator(s).unwrap()).unwrap()
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let m = gen("annulus:8");
        let dec = Dec::new(&m);
        let one = Cochain::new(&m, 0, vec![1.0; m.vertex_count()]).unwrap();
        let d = dec.exterior_derivative(&one).unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn vertex_indicator_on_triangle() {
        let m = SimplicialComplex::build(&[vec![0, 1, 2]]).unwrap();
        let dec = Dec::new(&m);
        let x = Cochain::new(&m, 0, vec![1.0, 0.0, 0.0]).unwrap();
        let d = dec.exterior_derivative(&x).unwrap();
        // edges (0,1), (0,2), (1,2): value at head minus value at tail
        assert_eq!(d.values, vec![-1.0, -1.0, 0.0]);
    }

    #[test]
    fn top_degree_derivative_overflows() {
        let m = SimplicialComplex::build(&[vec![0, 1, 2]]).unwrap();
        let dec = Dec::new(&m);
        let x = Cochain::zeros(&m, 2);
        assert_eq!(dec.exterior_derivative(&x).unwrap_err(), DecError::DegreeOverflow { degree: 2, dim: 2 });
        let y = Cochain::zeros(&m, 0);
        assert_eq!(dec.codifferential(&y).unwrap_err(), DecError::DegreeUnderflow);
    }

    #[test]
    fn equilateral_stars_agree() {
        let m = gen("disk:3");
        let circ = InnerProductStructure::for_complex(&m);
        assert_eq!(circ.kind(), StarKind::Circumcentric);
        let share = volume_share(&m);
        for k in 0..=2 {
            for (a, b) in circ.weights(k).iter().zip(&share[k]) {
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn right_triangles_fall_back_to_volume_share() {
        let m = gen("torus2:4");
        assert_eq!(InnerProductStructure::for_complex(&m).kind(), StarKind::VolumeShare);
        let m = gen("annulus:16");
        assert_eq!(InnerProductStructure::for_complex(&m).kind(), StarKind::Circumcentric);
    }

    #[test]
    fn unit_edge_inner_product_is_its_weight() {
        let m = gen("disk:2");
        let dec = Dec::new(&m);
        let mut e = Cochain::zeros(&m, 1);
        e.values[3] = 1.0;
        let mut f = Cochain::zeros(&m, 1);
        f.values[4] = 1.0;
        assert_eq!(dec.inner_product(&e, &e).unwrap(), dec.weights(1)[3]);
        assert_eq!(dec.inner_product(&e, &f).unwrap(), 0.0);
        let v = Cochain::zeros(&m, 0);
        assert!(matches!(dec.inner_product(&e, &v), Err(DecError::DegreeMismatch { .. })));
    }

    #[test]
    fn json_round_trip() {
        let m = gen("disk:1");
        let c = Cochain::new(&m, 1, (0..m.count(1)).map(|i| i as f64 * 0.5).collect()).unwrap();
        let back = Cochain::from_json(&c.to_json(), &m).unwrap();
        assert_eq!(back, c);
        assert!(matches!(
            Cochain::from_json(r#"{"degree":1,"values":[1.0],"mesh_id":"x"}"#, &m),
            Err(DecError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn trace_of_constant_is_constant() {
        let m = gen("disk:4");
        let b = m.boundary_complex().unwrap();
        let dec = Dec::new(&m);
        let one = Cochain::new(&m, 0, vec![1.0; m.vertex_count()]).unwrap();
        let t = dec.tangential_trace(&one, &b).unwrap();
        assert_eq!(t.len(), b.complex().vertex_count());
        assert!(t.values.iter().all(|v| *v == 1.0));
    }
}
