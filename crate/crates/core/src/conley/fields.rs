//! Example vector fields for the cubical dynamics layer.

use serde::Deserialize;

use super::dynamics::VectorField;
use super::ConleyError;

/// ẋ = M (x − c).
#[derive(Debug, Clone)]
pub struct LinearField {
    matrix: Vec<Vec<f64>>,
    center: Vec<f64>,
}

impl LinearField {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self, ConleyError> {
        let n = matrix.len();
        if n == 0 || n > 3 || matrix.iter().any(|r| r.len() != n) {
            return Err(ConleyError::BadGrid("linear field needs a square matrix of size 1..=3".into()));
        }
        Ok(LinearField { matrix, center: vec![0.0; n] })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self, ConleyError> {
        let n = d.len();
        LinearField::new((0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect())
    }

    /// ẋ = x, ẏ = −y.
    pub fn saddle() -> Self {
        LinearField::diagonal(&[1.0, -1.0]).unwrap()
    }

    pub fn attractor(n: usize) -> Result<Self, ConleyError> {
        LinearField::diagonal(&vec![-1.0; n])
    }

    pub fn repeller(n: usize) -> Result<Self, ConleyError> {
        LinearField::diagonal(&vec![1.0; n])
    }

    /// ẋ = −y, ẏ = x.
    pub fn rotation() -> Self {
        LinearField::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self, ConleyError> {
        if center.len() != self.matrix.len() {
            return Err(ConleyError::BadGrid("center has the wrong dimension".into()));
        }
        self.center = center;
        Ok(self)
    }
}

impl VectorField for LinearField {
    fn dim(&self) -> usize {
        self.matrix.len()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(x.iter().zip(&self.center)).map(|(m, (x, c))| m * (x - c)).sum())
            .collect()
    }

    fn lipschitz(&self) -> f64 {
        self.matrix.iter().flatten().map(|m| m * m).sum::<f64>().sqrt()
    }
}

/// Constant velocity.
#[derive(Debug, Clone)]
pub struct Drift {
    pub velocity: Vec<f64>,
}

impl VectorField for Drift {
    fn dim(&self) -> usize {
        self.velocity.len()
    }

    fn eval(&self, _x: &[f64]) -> Vec<f64> {
        self.velocity.clone()
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// ẋ = k(1 − r)x − ωy, ẏ = k(1 − r)y + ωx: attracting periodic orbit on the
/// unit circle. The Lipschitz bound holds for r ≤ `radius_bound`.
#[derive(Debug, Clone)]
pub struct LimitCycle {
    pub rate: f64,
    pub omega: f64,
    pub radius_bound: f64,
}

impl VectorField for LimitCycle {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let r = x[0].hypot(x[1]);
        let g = self.rate * (1.0 - r);
        vec![g * x[0] - self.omega * x[1], g * x[1] + self.omega * x[0]]
    }

    fn lipschitz(&self) -> f64 {
        self.rate * (1.0 + 2.0 * self.radius_bound) + self.omega.abs()
    }
}

/// Gradient flow of x⁴ − x² in one dimension; Lipschitz bound for |x| ≤ `radius_bound`.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    pub radius_bound: f64,
}

impl VectorField for DoubleWell {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![2.0 * x[0] - 4.0 * x[0].powi(3)]
    }

    fn lipschitz(&self) -> f64 {
        12.0 * self.radius_bound * self.radius_bound + 2.0
    }
}

/// JSON description of a field.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Linear {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Drift {
        velocity: Vec<f64>,
    },
    LimitCycle {
        rate: f64,
        omega: f64,
        radius_bound: f64,
    },
    DoubleWell {
        radius_bound: f64,
    },
}

impl FieldSpec {
    pub fn build(self) -> Result<Box<dyn VectorField>, ConleyError> {
        Ok(match self {
            FieldSpec::Linear { matrix, center } => {
                let f = LinearField::new(matrix)?;
                match center {
                    Some(c) => Box::new(f.with_center(c)?),
                    None => Box::new(f),
                }
            }
            FieldSpec::Drift { velocity } => Box::new(Drift { velocity }),
            FieldSpec::LimitCycle { rate, omega, radius_bound } => Box::new(LimitCycle { rate, omega, radius_bound }),
            FieldSpec::DoubleWell { radius_bound } => Box::new(DoubleWell { radius_bound }),
        })
    }
}

/// Named fields: saddle, attractor, repeller, rotation, zero, limit-cycle,
/// double-well. `dim` applies to attractor, repeller and zero; `radius` is a
/// bound on |x| over the box.
pub fn named_field(name: &str, dim: usize, radius: f64) -> Result<Box<dyn VectorField>, ConleyError> {
    Ok(match name {
        "saddle" => Box::new(LinearField::saddle()),
        "attractor" => Box::new(LinearField::attractor(dim)?),
        "repeller" => Box::new(LinearField::repeller(dim)?),
        "rotation" => Box::new(LinearField::rotation()),
        "zero" => Box::new(Drift { velocity: vec![0.0; dim] }),
        "limit-cycle" => Box::new(LimitCycle { rate: 1.0, omega: 1.0, radius_bound: radius }),
        "double-well" => Box::new(DoubleWell { radius_bound: radius }),
        other => return Err(ConleyError::UnknownField(other.to_string())),
    })
}

/// A field given either by name or as a JSON object.
pub fn parse_field(text: &str, dim: usize, radius: f64) -> Result<Box<dyn VectorField>, ConleyError> {
    let t = text.trim();
    if t.starts_with('{') {
        let spec: FieldSpec = serde_json::from_str(t).map_err(|e| ConleyError::UnknownField(e.to_string()))?;
        spec.build()
    } else {
        named_field(t, dim, radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_values() {
        let f = LinearField::saddle();
        assert_eq!(f.eval(&[2.0, 3.0]), vec![2.0, -3.0]);
    }

    #[test]
    fn centered_field() {
        let f = LinearField::attractor(2).unwrap().with_center(vec![0.5, -0.5]).unwrap();
        assert_eq!(f.eval(&[0.5, -0.5]), vec![0.0, 0.0]);
    }

    #[test]
    fn limit_cycle_is_tangent_on_unit_circle() {
        let f = LimitCycle { rate: 3.0, omega: 2.0, radius_bound: 2.0 };
        let v = f.eval(&[0.6, 0.8]);
        assert!((v[0] * 0.6 + v[1] * 0.8).abs() < 1e-12);
    }

    #[test]
    fn json_field() {
        let f = parse_field(r#"{"kind":"linear","matrix":[[0,1],[-1,0]]}"#, 2, 1.0).unwrap();
        assert_eq!(f.eval(&[1.0, 0.0]), vec![0.0, -1.0]);
        assert!(parse_field("nope", 2, 1.0).is_err());
    }
}
