//! Value-level entry points: each builds a [`PointGeometry`] at the
//! default jet order and extracts plain components.

use super::chart::{MetricPatch, OneForm, ScalarField, SymmetricField, VectorField};
use super::local::PointGeometry;
use super::tensor::{Slot, TensorValue};
use crate::error::{Error, Result};
use crate::exprjet::DEFAULT_JET_ORDER;

fn at(g: &MetricPatch, p: &[f64]) -> Result<PointGeometry> {
    PointGeometry::new(g, p, DEFAULT_JET_ORDER)
}

/// Metric (0,2) and inverse (2,0) at `p`.
pub fn metric_at(g: &MetricPatch, p: &[f64]) -> Result<(TensorValue, TensorValue)> {
    let geo = PointGeometry::new(g, p, 2)?;
    let n = geo.dim();
    let metric = TensorValue::from_jets(p, n, vec![Slot::Co, Slot::Co], geo.metric());
    let inverse =
        TensorValue::from_jets(p, n, vec![Slot::Contra, Slot::Contra], geo.inverse_metric());
    let (a, b) = (metric.data(), inverse.data());
    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[i * n + k] * b[k * n + j];
            }
            residual = residual.max((s - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    if residual > 1e-12 * (1.0 + metric.max_abs() * inverse.max_abs()) {
        return Err(Error::Singular { point: p.to_vec() });
    }
    Ok((metric, inverse))
}

/// Γ^k_ij, indexed `[k][i][j]`.
pub fn christoffel(g: &MetricPatch, p: &[f64]) -> Result<TensorValue> {
    let geo = PointGeometry::new(g, p, 2)?;
    Ok(TensorValue::from_jets(
        p,
        geo.dim(),
        vec![Slot::Contra, Slot::Co, Slot::Co],
        geo.christoffel(),
    ))
}

/// R^l_ijk (indexed `[l][i][j][k]`) and the lowered R_ijkl.
pub fn riemann(g: &MetricPatch, p: &[f64]) -> Result<(TensorValue, TensorValue)> {
    let geo = PointGeometry::new(g, p, 2)?;
    let n = geo.dim();
    let up = TensorValue::from_jets(
        p,
        n,
        vec![Slot::Contra, Slot::Co, Slot::Co, Slot::Co],
        geo.riemann(),
    );
    let down = TensorValue::from_jets(p, n, vec![Slot::Co; 4], &geo.riemann_lowered());
    Ok((up, down))
}

pub fn ricci(g: &MetricPatch, p: &[f64]) -> Result<TensorValue> {
    let geo = PointGeometry::new(g, p, 2)?;
    Ok(TensorValue::from_jets(
        p,
        geo.dim(),
        vec![Slot::Co, Slot::Co],
        geo.ricci(),
    ))
}

pub fn ricci_operator(g: &MetricPatch, p: &[f64]) -> Result<TensorValue> {
    let geo = PointGeometry::new(g, p, 2)?;
    Ok(TensorValue::from_jets(
        p,
        geo.dim(),
        vec![Slot::Contra, Slot::Co],
        &geo.ricci_operator(),
    ))
}

pub fn scalar_curvature(g: &MetricPatch, p: &[f64]) -> Result<f64> {
    Ok(PointGeometry::new(g, p, 2)?.scal().value())
}

pub fn grad(g: &MetricPatch, f: &ScalarField, p: &[f64]) -> Result<Vec<f64>> {
    let geo = at(g, p)?;
    let fj = geo.scalar(f)?;
    Ok(geo.grad(&fj)?.iter().map(|j| j.value()).collect())
}

pub fn hessian(g: &MetricPatch, f: &ScalarField, p: &[f64]) -> Result<TensorValue> {
    let geo = at(g, p)?;
    let fj = geo.scalar(f)?;
    TensorValue::symmetric(
        p,
        geo.dim(),
        geo.hessian(&fj)?.iter().map(|j| j.value()).collect(),
    )
}

pub fn laplacian(g: &MetricPatch, f: &ScalarField, p: &[f64]) -> Result<f64> {
    let geo = at(g, p)?;
    let fj = geo.scalar(f)?;
    Ok(geo.laplacian(&fj)?.value())
}

pub fn lie_derivative_metric(g: &MetricPatch, x: &VectorField, p: &[f64]) -> Result<TensorValue> {
    let geo = at(g, p)?;
    let xj = geo.vector(x)?;
    TensorValue::symmetric(
        p,
        geo.dim(),
        geo.lie_derivative_metric(&xj)?
            .iter()
            .map(|j| j.value())
            .collect(),
    )
}

/// (∇X)^i_j, indexed `[i][j]`.
pub fn covariant_derivative_vector(
    g: &MetricPatch,
    x: &VectorField,
    p: &[f64],
) -> Result<TensorValue> {
    let geo = at(g, p)?;
    let xj = geo.vector(x)?;
    Ok(TensorValue::from_jets(
        p,
        geo.dim(),
        vec![Slot::Contra, Slot::Co],
        &geo.nabla_vector(&xj)?,
    ))
}

/// (|X|², |∇X|²).
pub fn vector_field_norms(g: &MetricPatch, x: &VectorField, p: &[f64]) -> Result<(f64, f64)> {
    let geo = at(g, p)?;
    let xj = geo.vector(x)?;
    let norm = geo.inner(&xj, &xj).value();
    let nabla = geo.norm2_mixed(&geo.nabla_vector(&xj)?).value();
    Ok((norm, nabla))
}

pub enum DivergenceInput<'a> {
    Vector(&'a VectorField),
    OneForm(&'a OneForm),
    Symmetric(&'a SymmetricField),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Divergence {
    Scalar(f64),
    Covector(Vec<f64>),
}

pub fn divergence(g: &MetricPatch, t: DivergenceInput<'_>, p: &[f64]) -> Result<Divergence> {
    let geo = at(g, p)?;
    Ok(match t {
        DivergenceInput::Vector(x) => Divergence::Scalar(geo.div_vector(&geo.vector(x)?)?.value()),
        DivergenceInput::OneForm(w) => {
            Divergence::Scalar(geo.div_covector(&geo.one_form(w)?)?.value())
        }
        DivergenceInput::Symmetric(s) => {
            let n = geo.dim();
            let mut jets = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    jets.push(geo.eval(s.component(i, j))?);
                }
            }
            Divergence::Covector(
                geo.div_covariant2(&jets)?
                    .iter()
                    .map(|j| j.value())
                    .collect(),
            )
        }
    })
}

/// grad(scal) and Hess(scal), differentiating through the curvature pipeline.
/// Needs jet order ≥ 4.
pub fn scalar_curvature_derivatives(
    g: &MetricPatch,
    p: &[f64],
    order: usize,
) -> Result<(Vec<f64>, TensorValue)> {
    if order < 4 {
        return Err(Error::OrderExceeded {
            requested: 4,
            available: order,
        });
    }
    let geo = PointGeometry::new(g, p, order)?;
    let scal = geo.scal().clone();
    let grad = geo.grad(&scal)?.iter().map(|j| j.value()).collect();
    let hess = TensorValue::symmetric(
        p,
        geo.dim(),
        geo.hessian(&scal)?.iter().map(|j| j.value()).collect(),
    )?;
    Ok((grad, hess))
}
