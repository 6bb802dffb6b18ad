use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprjet::{Jet, DEFAULT_JET_ORDER};

use super::{Potential, SolitonInstance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub lambda: f64,
    pub mu: f64,
    /// Largest residual component over all samples at the fitted constants.
    pub max_residual: f64,
    pub lambda_identifiable: bool,
    pub mu_identifiable: bool,
    pub points_used: usize,
}

impl FitResult {
    pub fn identifiable(&self) -> bool {
        self.lambda_identifiable && self.mu_identifiable
    }
}

/// Per-point linear model A + λ·g + μ·η⊗η of the soliton residual.
struct Columns {
    a: Vec<f64>,
    g: Vec<f64>,
    d: Vec<f64>,
}

fn columns(inst: &SolitonInstance, p: &[f64]) -> Result<Columns> {
    let sp = inst.at_order(p, DEFAULT_JET_ORDER)?;
    let geo = sp.geometry();
    let first: Vec<Jet> = match inst.potential() {
        Potential::Gradient(_) => geo.hessian(sp.potential().expect("gradient potential"))?,
        Potential::Field(_) => geo
            .lie_derivative_metric(sp.xi())?
            .iter()
            .map(|j| j.scale(0.5))
            .collect(),
    };
    let scal = geo.scal().value();
    let g: Vec<f64> = geo.metric().iter().map(Jet::value).collect();
    let a = first
        .iter()
        .zip(&g)
        .map(|(h, g)| h.value() - scal * g)
        .collect();
    let d = geo
        .outer(sp.eta(), sp.eta())
        .iter()
        .map(Jet::value)
        .collect();
    Ok(Columns { a, g, d })
}

/// Least-squares (λ, μ) over every residual component at every sample,
/// ignoring the instance's own coefficient fields.
///
/// Sums run sequentially in sample order. A rank-deficient system gets the
/// minimum-norm solution, and the unresolved direction is flagged.
pub fn fit_constants(inst: &SolitonInstance, points: &[Vec<f64>]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::Precondition(
            "fitting needs at least two sample points".into(),
        ));
    }
    let cols = points
        .iter()
        .map(|p| columns(inst, p))
        .collect::<Result<Vec<_>>>()?;
    let (mut gg, mut gd, mut dd, mut ga, mut da) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for c in &cols {
        for k in 0..c.a.len() {
            gg += c.g[k] * c.g[k];
            gd += c.g[k] * c.d[k];
            dd += c.d[k] * c.d[k];
            ga += c.g[k] * c.a[k];
            da += c.d[k] * c.a[k];
        }
    }
    let (b0, b1) = (-ga, -da);
    let full_rank = dd > 1e-24 * gg && 1.0 - gd * gd / (gg * dd) > 1e-10;
    let (lambda, mu, lambda_identifiable, mu_identifiable) = if full_rank {
        let det = gg * dd - gd * gd;
        (
            (b0 * dd - gd * b1) / det,
            (gg * b1 - gd * b0) / det,
            true,
            true,
        )
    } else {
        // Rank one: keep the dominant eigenvector of the normal matrix.
        let tr = gg + dd;
        let disc = ((gg - dd) * (gg - dd) + 4.0 * gd * gd).sqrt();
        let e = 0.5 * (tr + disc);
        let (vx, vy) = if gd.abs() > 1e-300 {
            let (x, y) = (gd, e - gg);
            let norm = (x * x + y * y).sqrt();
            (x / norm, y / norm)
        } else if gg >= dd {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let coef = (vx * b0 + vy * b1) / e;
        // Null direction is (−vy, vx).
        (coef * vx, coef * vy, vy.abs() <= 1e-6, vx.abs() <= 1e-6)
    };
    let mut max_residual = 0.0f64;
    for c in &cols {
        for k in 0..c.a.len() {
            max_residual = max_residual.max((c.a[k] + lambda * c.g[k] + mu * c.d[k]).abs());
        }
    }
    Ok(FitResult {
        lambda,
        mu,
        max_residual,
        lambda_identifiable,
        mu_identifiable,
        points_used: points.len(),
    })
}
