//! Warped products B ×_φ F and the identities that transfer soliton data
//! between the base and the product, plus integral identities on tori.

mod conditions;
mod torus;

pub use conditions::{
    base_condition_residual, divergence_identities, lambda_base, required_fiber_scal,
    tensor_condition_residual, verify_warped_soliton, DivergenceIdentities, TensorConditionReport,
    WarpedSolitonReport,
};
pub use torus::{
    compact_integral_checks, torus_integral, torus_integral_with, AggregateTerms, CompactReport,
    PeriodicChart, TorusInstance,
};

use crate::error::{Error, Result};
use crate::exprjet::{BinOp, Expr, Jet};
use crate::geometry::{Chart, MetricPatch, PointGeometry, Residual, ScalarField};

/// Base, fiber, warping function and the assembled product metric.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedProduct {
    base: MetricPatch,
    fiber: MetricPatch,
    warping: ScalarField,
    product: MetricPatch,
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Lit(v) if *v == 1.0)
}

/// Assembles g_B ⊕ φ²g_F on the product chart (base coordinates first).
///
/// φ must be positive at every validation point (base coordinates).
pub fn build_warped(
    base: &MetricPatch,
    fiber: &MetricPatch,
    phi: &Expr,
    validation_points: &[Vec<f64>],
) -> Result<WarpedProduct> {
    let (bc, fc) = (base.chart(), fiber.chart());
    if let Some(c) = bc.coords().iter().find(|c| fc.coords().contains(c)) {
        return Err(Error::Construction(format!(
            "coordinate `{c}` appears in both base and fiber"
        )));
    }
    let warping = ScalarField::new(bc, phi)?;
    for p in validation_points {
        bc.check_point(p)?;
        let v = warping.eval(p)?;
        if !(v > 0.0) {
            return Err(Error::Construction(format!(
                "warping function `{phi}` is {v} at {p:?}; it must be positive"
            )));
        }
    }
    let coords: Vec<String> = bc.coords().iter().chain(fc.coords()).cloned().collect();
    let constraints: Vec<Expr> = bc.constraints().chain(fc.constraints()).cloned().collect();
    let chart = Chart::new(format!("{}x{}", bc.name(), fc.name()), coords, constraints)?;
    let (n, m) = (bc.dim(), fc.dim());
    let phi2 = Expr::binary(BinOp::Pow, phi.clone(), Expr::lit(2.0));
    let mut upper = Vec::with_capacity((n + m) * (n + m + 1) / 2);
    for i in 0..n + m {
        for j in i..n + m {
            upper.push(if j < n {
                base.component(i, j).expr().clone()
            } else if i < n {
                Expr::lit(0.0)
            } else {
                let gf = fiber.component(i - n, j - n).expr().clone();
                if is_one(phi) || gf.is_zero_literal() {
                    gf
                } else {
                    Expr::binary(BinOp::Mul, phi2.clone(), gf)
                }
            });
        }
    }
    Ok(WarpedProduct {
        base: base.clone(),
        fiber: fiber.clone(),
        warping,
        product: MetricPatch::new(chart, &upper)?,
    })
}

impl WarpedProduct {
    pub fn base(&self) -> &MetricPatch {
        &self.base
    }

    pub fn fiber(&self) -> &MetricPatch {
        &self.fiber
    }

    pub fn warping(&self) -> &ScalarField {
        &self.warping
    }

    pub fn product(&self) -> &MetricPatch {
        &self.product
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim()
    }

    /// Splits a product point into base and fiber parts.
    pub fn split<'a>(&self, p: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        p.split_at(self.base_dim())
    }

    /// Pull-back of a base field to the product chart.
    pub fn lift(&self, f: &ScalarField) -> Result<ScalarField> {
        ScalarField::new(self.product.chart(), f.expr())
    }
}

/// Defects of the lifted gradient and of the base block of the lifted Hessian.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LiftResiduals {
    pub gradient: Residual,
    pub hessian: Residual,
}

/// Compares grad f̃ and Hess f̃ on the product with the base quantities.
pub fn lift_checks(
    wp: &WarpedProduct,
    f: &ScalarField,
    points: &[Vec<f64>],
) -> Result<LiftResiduals> {
    let lifted = wp.lift(f)?;
    let n = wp.base_dim();
    let nm = n + wp.fiber_dim();
    let mut out = LiftResiduals {
        gradient: Residual::default(),
        hessian: Residual::default(),
    };
    for p in points {
        let (pb, _) = wp.split(p);
        let total = PointGeometry::new(wp.product(), p, 3)?;
        let fj = total.scalar(&lifted)?;
        let grad = total.grad(&fj)?;
        let hess = total.hessian(&fj)?;
        let base = PointGeometry::new(wp.base(), pb, 3)?;
        let fb = base.scalar(f)?;
        let grad_b = base.grad(&fb)?;
        let hess_b = base.hessian(&fb)?;
        for i in 0..nm {
            let expected = if i < n { grad_b[i].value() } else { 0.0 };
            let got = grad[i].value();
            out.gradient = out
                .gradient
                .max(Residual::new(got - expected, got.abs().max(expected.abs())));
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (hess[i * nm + j].value(), hess_b[i * n + j].value());
                out.hessian = out.hessian.max(Residual::new(a - b, a.abs().max(b.abs())));
            }
        }
    }
    Ok(out)
}

/// Base quantities at a base point, all as jets.
struct BaseTerms {
    geo: PointGeometry,
    f: Jet,
    xi: Vec<Jet>,
    phi: Jet,
    /// ξ(φ)/φ.
    xi_phi_over_phi: Jet,
}

impl BaseTerms {
    fn new(
        g: &MetricPatch,
        f: &ScalarField,
        phi: &ScalarField,
        p: &[f64],
        order: usize,
    ) -> Result<Self> {
        let geo = PointGeometry::new(g, p, order)?;
        let fj = geo.scalar(f)?;
        let xi = geo.grad(&fj)?;
        let phij = geo.scalar(phi)?;
        if !(phij.value() > 0.0) {
            return Err(Error::Construction(format!(
                "warping function is {} at {p:?}; it must be positive",
                phij.value()
            )));
        }
        let xi_phi_over_phi = geo.directional(&xi, &phij)?.div(&phij)?;
        Ok(BaseTerms {
            geo,
            f: fj,
            xi,
            phi: phij,
            xi_phi_over_phi,
        })
    }
}

/// scal_B + scal_F/φ² − 2mΔφ/φ − m(m−1)|grad φ|²/φ², each piece computed on
/// its own factor.
pub fn warped_scal_formula(wp: &WarpedProduct, p: &[f64]) -> Result<f64> {
    let (pb, pf) = wp.split(p);
    let m = wp.fiber_dim() as f64;
    let base = PointGeometry::new(wp.base(), pb, 2)?;
    let fiber = PointGeometry::new(wp.fiber(), pf, 2)?;
    let phi = base.scalar(wp.warping())?;
    let v = phi.value();
    let lap = base.laplacian(&phi)?.value();
    let dphi = base.differential(&phi)?;
    let grad2 = base.inner_covectors(&dphi, &dphi).value();
    Ok(base.scal().value() + fiber.scal().value() / (v * v)
        - 2.0 * m * lap / v
        - m * (m - 1.0) * grad2 / (v * v))
}

/// Formula value against the curvature of the assembled product metric.
pub fn warped_scal_crosscheck(wp: &WarpedProduct, p: &[f64]) -> Result<Residual> {
    let formula = warped_scal_formula(wp, p)?;
    let direct = crate::geometry::scalar_curvature(wp.product(), p)?;
    Ok(Residual::new(formula - direct, direct.abs()))
}
