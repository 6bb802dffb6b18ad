use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprjet::{Jet, DEFAULT_JET_ORDER};
use crate::geometry::{MetricPatch, PointGeometry, Residual, ScalarField, Slot, TensorValue};
use crate::soliton::{sum_terms, ResidualTensor, SolitonPoint};

use super::{BaseTerms, WarpedProduct};

fn base_terms(g: &MetricPatch, f: &ScalarField, phi: &ScalarField, p: &[f64]) -> Result<BaseTerms> {
    BaseTerms::new(g, f, phi, p, DEFAULT_JET_ORDER)
}

/// Δf + μ|grad f|² − n·(grad f)(φ)/φ on the base.
pub fn base_condition_residual(
    g: &MetricPatch,
    f: &ScalarField,
    mu: &ScalarField,
    phi: &ScalarField,
    p: &[f64],
) -> Result<Residual> {
    let b = base_terms(g, f, phi, p)?;
    base_condition_from(&b, &b.geo.scalar(mu)?)
}

fn base_condition_from(b: &BaseTerms, mu: &Jet) -> Result<Residual> {
    let n = b.geo.dim() as f64;
    Ok(sum_terms(&[
        b.geo.laplacian(&b.f)?.value(),
        mu.value() * b.geo.inner(&b.xi, &b.xi).value(),
        -n * b.xi_phi_over_phi.value(),
    ]))
}

/// λ_B = scal_B − (grad f)(φ)/φ.
pub fn lambda_base(g: &MetricPatch, f: &ScalarField, phi: &ScalarField, p: &[f64]) -> Result<f64> {
    let b = base_terms(g, f, phi, p)?;
    Ok(b.geo.scal().value() - b.xi_phi_over_phi.value())
}

/// (λ − λ_B)φ² + 2mφΔφ + m(m−1)|grad φ|², the scalar curvature the fiber
/// must carry.
pub fn required_fiber_scal(
    g: &MetricPatch,
    f: &ScalarField,
    phi: &ScalarField,
    lambda: &ScalarField,
    m: usize,
    p: &[f64],
) -> Result<f64> {
    let b = base_terms(g, f, phi, p)?;
    required_from(&b, &b.geo.scalar(lambda)?, m)
}

fn required_from(b: &BaseTerms, lambda: &Jet, m: usize) -> Result<f64> {
    let m = m as f64;
    let phi = b.phi.value();
    let lambda_b = b.geo.scal().value() - b.xi_phi_over_phi.value();
    let dphi = b.geo.differential(&b.phi)?;
    let grad2 = b.geo.inner_covectors(&dphi, &dphi).value();
    Ok((lambda.value() - lambda_b) * phi * phi
        + 2.0 * m * phi * b.geo.laplacian(&b.phi)?.value()
        + m * (m - 1.0) * grad2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarpedSolitonReport {
    /// Gradient soliton residual of (g_B, grad f, λ_B, μ).
    pub base_residual_max: Residual,
    /// Gradient soliton residual of (g, grad f̃, π*λ, π*μ).
    pub product_residual_max: Residual,
    pub base_condition_max: Residual,
    /// Spread of the required fiber curvature over the base samples.
    pub fiber_scal_spread: f64,
    /// Mean of the required fiber curvature.
    pub fiber_scal_required: f64,
    /// Largest gap between required and actual fiber curvature.
    pub fiber_scal_mismatch: Residual,
    /// (λ − scal) − (λ_B − scal_B).
    pub reduction_max: Residual,
    /// Hess f̃(V,W) − ((grad f)(φ)/φ)·φ²g_F(V,W) on fiber indices.
    pub fiber_hessian_max: Residual,
    /// Largest mixed-block component of g and of Hess f̃.
    pub mixed_block_max: f64,
}

impl WarpedSolitonReport {
    pub fn hypotheses_hold(&self, tol: f64) -> bool {
        self.base_condition_max.within(tol)
            && self.fiber_scal_spread <= tol * (1.0 + self.fiber_scal_required.abs())
            && self.fiber_scal_mismatch.within(tol)
    }

    pub fn base_ok(&self, tol: f64) -> bool {
        self.base_residual_max.within(tol)
    }

    pub fn product_ok(&self, tol: f64) -> bool {
        self.product_residual_max.within(tol)
    }

    /// The equivalence, where its hypotheses apply.
    pub fn iff_holds(&self, tol: f64) -> bool {
        !self.hypotheses_hold(tol) || self.base_ok(tol) == self.product_ok(tol)
    }
}

/// Evaluates both sides of the warped-product construction at product
/// sample points. Fails when the base condition on (f, μ, φ) is violated.
pub fn verify_warped_soliton(
    wp: &WarpedProduct,
    f: &ScalarField,
    lambda: &ScalarField,
    mu: &ScalarField,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<WarpedSolitonReport> {
    let n = wp.base_dim();
    let nm = n + wp.fiber_dim();
    let (f_t, lambda_t, mu_t) = (wp.lift(f)?, wp.lift(lambda)?, wp.lift(mu)?);
    let mut rep = WarpedSolitonReport {
        base_residual_max: Residual::default(),
        product_residual_max: Residual::default(),
        base_condition_max: Residual::default(),
        fiber_scal_spread: 0.0,
        fiber_scal_required: 0.0,
        fiber_scal_mismatch: Residual::default(),
        reduction_max: Residual::default(),
        fiber_hessian_max: Residual::default(),
        mixed_block_max: 0.0,
    };
    let mut violations = Vec::new();
    let mut required = Vec::with_capacity(points.len());
    for p in points {
        let (pb, pf) = wp.split(p);
        let b = BaseTerms::new(wp.base(), f, wp.warping(), pb, DEFAULT_JET_ORDER)?;
        let mu_b = b.geo.scalar(mu)?;
        let cond = base_condition_from(&b, &mu_b)?;
        if !cond.within(tol) {
            violations.push(format!("{pb:?}: {:e}", cond.value));
        }
        rep.base_condition_max = rep.base_condition_max.max(cond);
        let lambda_jet = b.geo.scalar(lambda)?;
        let req = required_from(&b, &lambda_jet, wp.fiber_dim())?;
        required.push(req);
        let scal_f = crate::geometry::scalar_curvature(wp.fiber(), pf)?;
        rep.fiber_scal_mismatch = rep
            .fiber_scal_mismatch
            .max(Residual::new(req - scal_f, req.abs().max(scal_f.abs())));

        let lambda_b = b.geo.scal().sub(&b.xi_phi_over_phi);
        let reduction_base = lambda_b.value() - b.geo.scal().value();
        let df = b.geo.differential(&b.f)?;
        let base_point = SolitonPoint::from_parts(
            b.geo.clone(),
            Some(b.f.clone()),
            b.xi.clone(),
            Some(df),
            lambda_b,
            mu_b,
        )?;
        rep.base_residual_max = rep
            .base_residual_max
            .max(base_point.gradient_soliton_residual()?.residual());

        let total = PointGeometry::new(wp.product(), p, DEFAULT_JET_ORDER)?;
        let ft = total.scalar(&f_t)?;
        let xi_t = total.grad(&ft)?;
        let dft = total.differential(&ft)?;
        let lt = total.scalar(&lambda_t)?;
        let reduction_total = lt.value() - total.scal().value();
        rep.reduction_max = rep.reduction_max.max(Residual::new(
            reduction_total - reduction_base,
            reduction_total.abs().max(reduction_base.abs()),
        ));
        let hess = total.hessian(&ft)?;
        let k = b.xi_phi_over_phi.value();
        for i in 0..nm {
            for j in 0..nm {
                let h = hess[i * nm + j].value();
                let g = total.metric()[i * nm + j].value();
                if (i < n) != (j < n) {
                    rep.mixed_block_max = rep.mixed_block_max.max(h.abs()).max(g.abs());
                } else if i >= n {
                    rep.fiber_hessian_max = rep
                        .fiber_hessian_max
                        .max(Residual::new(h - k * g, h.abs().max((k * g).abs())));
                }
            }
        }
        let mt = total.scalar(&mu_t)?;
        let product_point = SolitonPoint::from_parts(total, Some(ft), xi_t, Some(dft), lt, mt)?;
        rep.product_residual_max = rep
            .product_residual_max
            .max(product_point.gradient_soliton_residual()?.residual());
    }
    if !violations.is_empty() {
        return Err(Error::Construction(format!(
            "base condition on (f, mu, phi) fails at {}",
            violations.join("; ")
        )));
    }
    if !required.is_empty() {
        let lo = required.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = required.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        rep.fiber_scal_spread = hi - lo;
        rep.fiber_scal_required = required.iter().sum::<f64>() / required.len() as f64;
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorConditionReport {
    /// Hess f − (n/2φ)(df⊗dφ + dφ⊗df) + μ df⊗df.
    pub residual: ResidualTensor,
    /// g-trace of the residual minus the scalar base condition.
    pub trace_vs_scalar_condition: Residual,
    /// ∇ξ − [(n/2φ)(df⊗grad φ + dφ⊗ξ) − μ df⊗ξ], as a (1,1) tensor.
    pub nabla_xi_audit: ResidualTensor,
}

/// The tensor condition on the base and its two displayed consequences.
pub fn tensor_condition_residual(
    g: &MetricPatch,
    f: &ScalarField,
    mu: &ScalarField,
    phi: &ScalarField,
    p: &[f64],
) -> Result<TensorConditionReport> {
    let b = base_terms(g, f, phi, p)?;
    let geo = &b.geo;
    let n = geo.dim();
    let nf = n as f64;
    let mu_j = geo.scalar(mu)?;
    let hess = geo.hessian(&b.f)?;
    let df = geo.differential(&b.f)?;
    let dphi = geo.differential(&b.phi)?;
    let c = nf / (2.0 * b.phi.value());
    let m = mu_j.value();
    let mut data = Vec::with_capacity(n * n);
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let h = hess[i * n + j].value();
            let cross = c * (df[i].value() * dphi[j].value() + dphi[i].value() * df[j].value());
            let quad = m * df[i].value() * df[j].value();
            scale = scale.max(h.abs()).max(cross.abs()).max(quad.abs());
            data.push(h - cross + quad);
        }
    }
    let tensor = TensorValue::symmetric(geo.point(), n, data)?;
    let trace: f64 = {
        let ginv = geo.inverse_metric();
        (0..n * n).map(|a| ginv[a].value() * tensor.data()[a]).sum()
    };
    let scalar = base_condition_from(&b, &mu_j)?;
    let trace_vs_scalar_condition = Residual::new(trace - scalar.value, scalar.scale);

    let nabla = geo.nabla_vector(&b.xi)?;
    let grad_phi = geo.raise(&dphi);
    let mut audit = Vec::with_capacity(n * n);
    let mut audit_scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let dj_f = df[j].value();
            let rhs = c * (dj_f * grad_phi[i].value() + dphi[j].value() * b.xi[i].value())
                - m * dj_f * b.xi[i].value();
            let lhs = nabla[i * n + j].value();
            audit_scale = audit_scale.max(lhs.abs()).max(rhs.abs());
            audit.push(lhs - rhs);
        }
    }
    Ok(TensorConditionReport {
        residual: ResidualTensor { tensor, scale },
        trace_vs_scalar_condition,
        nabla_xi_audit: ResidualTensor {
            tensor: TensorValue::new(geo.point(), n, vec![Slot::Contra, Slot::Co], audit)?,
            scale: audit_scale,
        },
    })
}

/// Signed residuals of the pointwise identities derived from the tensor
/// condition on the base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceIdentities {
    /// (div Hess f)(ξ) = div(Hess f(ξ)) − |Hess f − (Δf/n)g|² − (Δf)²/n.
    pub hessian_divergence: Residual,
    /// (div Hess f)(ξ) against the displayed right-hand side.
    pub div_hess_condition: Residual,
    /// The divergence of the tensor condition, contracted with ξ, with both
    /// cross terms differentiated separately.
    pub div_hess_split: Residual,
    /// div(Hess f(ξ)) against the displayed right-hand side.
    pub div_hess_xi_condition: Residual,
    /// div((1/φ)df⊗dφ) against its displayed expansion (covector, max norm).
    pub div_phi_aux: Residual,
    /// div(μ df⊗df) against its displayed expansion.
    pub div_mu_aux: Residual,
}

fn covector_gap(a: &[Jet], b: &[Jet]) -> Residual {
    let mut out = Residual::default();
    for (x, y) in a.iter().zip(b) {
        out = out.max(Residual::new(
            x.value() - y.value(),
            x.value().abs().max(y.value().abs()),
        ));
    }
    out
}

fn pair(w: &[Jet], x: &[Jet]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a.value() * b.value()).sum()
}

pub fn divergence_identities(
    g: &MetricPatch,
    f: &ScalarField,
    mu: &ScalarField,
    phi: &ScalarField,
    p: &[f64],
) -> Result<DivergenceIdentities> {
    let b = base_terms(g, f, phi, p)?;
    let geo = &b.geo;
    let n = geo.dim();
    let nf = n as f64;
    let mu_j = geo.scalar(mu)?;
    let xi = &b.xi;

    let hess = geo.hessian(&b.f)?;
    let div_hess = geo.div_covariant2(&hess)?;
    let div_hess_xi = pair(&div_hess, xi);
    let hess_xi = geo.contract_first(&hess, xi);
    let div_hess_of_xi = geo.div_covector(&hess_xi)?.value();
    let lap = geo.trace(&hess);
    let traceless: Vec<Jet> = hess
        .iter()
        .zip(geo.metric())
        .map(|(h, g)| h.sub(&g.mul(&lap).scale(1.0 / nf)))
        .collect();
    let t2 = geo.inner2(&traceless, &traceless).value();
    let l = lap.value();
    let hessian_divergence = sum_terms(&[div_hess_xi, -div_hess_of_xi, t2, l * l / nf]);

    let df = geo.differential(&b.f)?;
    let dphi = geo.differential(&b.phi)?;
    let phi_v = b.phi.value();
    let xi_phi = pair(&dphi, xi);
    let grad_phi = geo.raise(&dphi);
    let along = geo.covariant_along(xi, &grad_phi)?;
    let along_xi = geo.inner(&along, xi).value();
    let norm2 = geo.inner(xi, xi);
    let x2 = norm2.value();
    let dx2_xi = geo.directional(xi, &norm2)?.value();
    let dmu_xi = geo.directional(xi, &mu_j)?.value();
    let m = mu_j.value();
    let rhs = [
        nf * (l / phi_v - xi_phi / (phi_v * phi_v)) * xi_phi,
        nf / phi_v * along_xi,
        -0.5 * m * dx2_xi,
        -m * l * x2,
        -dmu_xi * x2,
    ];
    let mut terms = vec![div_hess_xi];
    terms.extend(rhs.iter().map(|t| -t));
    let div_hess_condition = sum_terms(&terms);

    let mut terms = vec![div_hess_of_xi, -t2, -l * l / nf];
    terms.extend(rhs.iter().map(|t| -t));
    let div_hess_xi_condition = sum_terms(&terms);

    let inv_phi = b.phi.recip()?;
    let df_over: Vec<Jet> = df.iter().map(|d| d.mul(&inv_phi)).collect();
    let dphi_over: Vec<Jet> = dphi.iter().map(|d| d.mul(&inv_phi)).collect();
    let a1 = geo.div_covariant2(&geo.outer(&df_over, &dphi))?;
    let a2 = geo.div_covariant2(&geo.outer(&dphi_over, &df))?;
    let mu_dfdf: Vec<Jet> = geo.outer(&df, &df).iter().map(|t| t.mul(&mu_j)).collect();
    let a3 = geo.div_covariant2(&mu_dfdf)?;
    let div_hess_split = sum_terms(&[
        div_hess_xi,
        -0.5 * nf * (pair(&a1, xi) + pair(&a2, xi)),
        pair(&a3, xi),
    ]);

    let hess_phi = geo.hessian(&b.phi)?;
    let coef = lap
        .mul(&inv_phi)
        .sub(&geo.directional(xi, &b.phi)?.mul(&inv_phi).mul(&inv_phi));
    let hess_phi_xi = geo.contract_first(&hess_phi, xi);
    let expansion1: Vec<Jet> = dphi
        .iter()
        .zip(&hess_phi_xi)
        .map(|(d, h)| coef.mul(d).add(&h.mul(&inv_phi)))
        .collect();
    let d_norm2 = geo.differential(&norm2)?;
    let dmu_xi_j = geo.directional(xi, &mu_j)?;
    let expansion2: Vec<Jet> = d_norm2
        .iter()
        .zip(&df)
        .map(|(dn, d)| {
            dn.mul(&mu_j)
                .scale(0.5)
                .add(&mu_j.mul(&lap).mul(d))
                .add(&dmu_xi_j.mul(d))
        })
        .collect();

    Ok(DivergenceIdentities {
        hessian_divergence,
        div_hess_condition,
        div_hess_split,
        div_hess_xi_condition,
        div_phi_aux: covector_gap(&a1, &expansion1),
        div_mu_aux: covector_gap(&a3, &expansion2),
    })
}
