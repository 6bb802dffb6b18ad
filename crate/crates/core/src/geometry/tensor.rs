use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprjet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Co,
    Contra,
}

/// Pointwise tensor components in a dense row-major array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorValue {
    point: Vec<f64>,
    dim: usize,
    signature: Vec<Slot>,
    data: Vec<f64>,
}

impl TensorValue {
    pub fn new(point: &[f64], dim: usize, signature: Vec<Slot>, data: Vec<f64>) -> Result<Self> {
        let expected = dim.pow(signature.len() as u32);
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "tensor with {} slots in dimension {dim} needs {expected} components, got {}",
                signature.len(),
                data.len()
            )));
        }
        Ok(TensorValue {
            point: point.to_vec(),
            dim,
            signature,
            data,
        })
    }

    pub fn from_jets(point: &[f64], dim: usize, signature: Vec<Slot>, jets: &[Jet]) -> Self {
        let data = jets.iter().map(Jet::value).collect();
        Self::new(point, dim, signature, data).expect("jet array matches signature")
    }

    /// Symmetric (0,2) tensor; rejects asymmetry beyond 1e−10 relative.
    pub fn symmetric(point: &[f64], dim: usize, data: Vec<f64>) -> Result<Self> {
        let t = Self::new(point, dim, vec![Slot::Co, Slot::Co], data)?;
        let scale = 1.0 + t.max_abs();
        for i in 0..dim {
            for j in i + 1..dim {
                if (t.data[i * dim + j] - t.data[j * dim + i]).abs() > 1e-10 * scale {
                    return Err(Error::Shape(format!(
                        "components ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(t)
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> &[Slot] {
        &self.signature
    }

    pub fn rank(&self) -> usize {
        self.signature.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank());
        let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.data[flat]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest componentwise difference to another tensor of the same shape.
    pub fn max_diff(&self, other: &TensorValue) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
