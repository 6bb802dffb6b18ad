//! Riemannian tensor calculus on a single coordinate chart.
//!
//! Conventions used everywhere in this crate:
//!
//! * R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z, and
//!   R_ijkl = g(R(∂_i,∂_j)∂_l, ∂_k), so R_ijij < 0 on hyperbolic space;
//! * Ric(Y,Z) = tr(X ↦ R(X,Y)Z), positive on round spheres;
//! * Δ = tr ∘ Hess, so Δ(|x|²/2) = n on Euclidean space.

mod chart;
pub mod identities;
mod local;
mod ops;
mod tensor;

pub use chart::{Chart, MetricPatch, OneForm, ScalarField, SymmetricField, VectorField};
pub(crate) use local::cholesky;
pub use local::PointGeometry;
pub use ops::{
    christoffel, covariant_derivative_vector, divergence, grad, hessian, laplacian,
    lie_derivative_metric, metric_at, ricci, ricci_operator, riemann, scalar_curvature,
    scalar_curvature_derivatives, vector_field_norms, Divergence, DivergenceInput,
};
pub use tensor::{Slot, TensorValue};

/// Absolute-plus-relative comparison: |value| against ε·(1 + scale).
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(value: f64, scale: f64) -> Self {
        Residual { value, scale }
    }

    /// Absolute residual (scale 0).
    pub fn abs(value: f64) -> Self {
        Residual { value, scale: 0.0 }
    }

    /// |value| / (1 + scale).
    pub fn normalized(&self) -> f64 {
        self.value.abs() / (1.0 + self.scale.abs())
    }

    pub fn within(&self, eps: f64) -> bool {
        self.normalized() <= eps
    }

    pub fn max(self, other: Residual) -> Residual {
        if other.normalized() > self.normalized() {
            other
        } else {
            self
        }
    }
}

/// Largest |a_i − b_i| and the largest |a_i|, |b_i| over two jet arrays' values.
pub(crate) fn max_diff_values(a: &[crate::exprjet::Jet], b: &[crate::exprjet::Jet]) -> Residual {
    let mut value = 0.0f64;
    let mut scale = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        value = value.max((x.value() - y.value()).abs());
        scale = scale.max(x.value().abs()).max(y.value().abs());
    }
    Residual::new(value, scale)
}
