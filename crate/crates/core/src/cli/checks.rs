//! Check registry and evaluators.

use std::cell::OnceCell;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exprjet::{Jet, JetSpace};
use crate::geometry::{identities, MetricPatch, PointGeometry, Residual, ScalarField};
use crate::oracle::{self, relative_error, DEFAULT_STEP};
use crate::soliton::{constant_scal_check, fit_constants, SolitonInstance, SolitonPoint};
use crate::warp::{
    compact_integral_checks, divergence_identities, lift_checks, tensor_condition_residual,
    verify_warped_soliton, warped_scal_crosscheck, CompactReport, DivergenceIdentities,
    TensorConditionReport, TorusInstance, WarpedSolitonReport,
};

use super::scenario::Model;

pub const IDENTITY_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-5;
pub const QUADRATURE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Asserted,
    ReportOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Geometry,
    Soliton,
    Warped,
    Base,
    Compact,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckDef {
    pub id: &'static str,
    pub status: Status,
    pub category: Category,
    pub tolerance: f64,
    pub about: &'static str,
}

const fn def(
    id: &'static str,
    status: Status,
    category: Category,
    tolerance: f64,
    about: &'static str,
) -> CheckDef {
    CheckDef {
        id,
        status,
        category,
        tolerance,
        about,
    }
}

use Category::*;
use Status::*;

pub const REGISTRY: &[CheckDef] = &[
    def(
        "scalar-curvature",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "|scal - scal_expected|",
    ),
    def(
        "riemann-symmetries",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "pair symmetries and first Bianchi",
    ),
    def(
        "metric-compatibility",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "covariant derivative of g",
    ),
    def(
        "contracted-bianchi",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "div Ric = d scal / 2",
    ),
    def(
        "hessian-symmetry",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "Hess f is symmetric",
    ),
    def(
        "traceless-hessian",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "|Hess f - (Δf/n)g|² expansion",
    ),
    def(
        "bochner-lemma-a",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "div Hess f = d Δf + Ric(grad f)",
    ),
    def(
        "bochner-lemma-b",
        Asserted,
        Geometry,
        IDENTITY_TOL,
        "Bochner formula for |grad f|²",
    ),
    def(
        "oracle-metric",
        Asserted,
        Geometry,
        ORACLE_TOL,
        "metric partials against finite differences",
    ),
    def(
        "oracle-scalar-curvature",
        Asserted,
        Geometry,
        ORACLE_TOL,
        "scal partials against finite differences",
    ),
    def(
        "soliton-residual",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "½L_ξg + (λ - scal)g + μη⊗η",
    ),
    def(
        "gradient-soliton-residual",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "Hess f + (λ - scal)g + μ df⊗df",
    ),
    def(
        "nabla-xi-residual",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "∇ξ + (λ - scal)I + μ df⊗ξ",
    ),
    def(
        "generalized-geodesic",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "∇_ξξ against [Δf + (n-1)(λ - scal)]ξ",
    ),
    def(
        "trace-identity",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "Δf + n(λ - scal) + μ|ξ|²",
    ),
    def(
        "pairing-identity",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "|Hess f|² + (λ - scal)Δf + (μ/2)ξ(|ξ|²)",
    ),
    def(
        "lambda-quadratic",
        Asserted,
        Soliton,
        QUADRATURE_TOL,
        "quadratic in λ after eliminating Δf",
    ),
    def(
        "lambda-quadratic-printed",
        ReportOnly,
        Soliton,
        QUADRATURE_TOL,
        "quadratic in λ with the published signs",
    ),
    def(
        "bochner-formula",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "Bochner-type formula for |ξ|²",
    ),
    def(
        "ricci-contraction",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "Ricci operator applied to ξ",
    ),
    def(
        "ricci-contraction-scalar",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "S(ξ,ξ) with the |ξ|² factor",
    ),
    def(
        "ricci-contraction-printed",
        ReportOnly,
        Soliton,
        IDENTITY_TOL,
        "S(ξ,ξ) as published, without |ξ|²",
    ),
    def(
        "grad-scal-alignment",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "grad scal parallel to ξ",
    ),
    def(
        "maximum-principle",
        ReportOnly,
        Soliton,
        IDENTITY_TOL,
        "S(ξ,ξ) ≤ (n-1)|∇ξ|² implies Δ|ξ|² ≥ 0",
    ),
    def(
        "constant-scal",
        ReportOnly,
        Soliton,
        IDENTITY_TOL,
        "hypotheses of the constant scalar curvature result",
    ),
    def(
        "fit-constants",
        Asserted,
        Soliton,
        IDENTITY_TOL,
        "least-squares constants (λ, μ)",
    ),
    def(
        "paper-constants-audit",
        ReportOnly,
        Soliton,
        IDENTITY_TOL,
        "soliton residual under the published constants",
    ),
    def(
        "warped-scal",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "warped scalar curvature formula against direct",
    ),
    def(
        "lift",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "gradient and Hessian of lifted base functions",
    ),
    def(
        "warped-base-condition",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "Δf + μ|grad f|² - n ξ(φ)/φ on the base",
    ),
    def(
        "warped-fiber-scal",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "required fiber curvature against scal_F",
    ),
    def(
        "warped-base-soliton",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "base soliton with λ_B = scal_B - ξ(φ)/φ",
    ),
    def(
        "warped-product-soliton",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "product soliton with lifted data",
    ),
    def(
        "warped-fiber-hessian",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "fiber block of the lifted Hessian",
    ),
    def(
        "warped-reduction",
        Asserted,
        Warped,
        IDENTITY_TOL,
        "λ - scal on product and base agree",
    ),
    def(
        "tensor-condition",
        Asserted,
        Base,
        IDENTITY_TOL,
        "Hess f - (n/2φ)(df⊗dφ + dφ⊗df) + μ df⊗df",
    ),
    def(
        "tensor-condition-trace",
        Asserted,
        Base,
        IDENTITY_TOL,
        "trace of the tensor condition",
    ),
    def(
        "tensor-condition-nabla-xi",
        ReportOnly,
        Base,
        IDENTITY_TOL,
        "displayed ∇ξ under the tensor condition",
    ),
    def(
        "hessian-divergence",
        Asserted,
        Base,
        IDENTITY_TOL,
        "(div Hess f)(ξ) against div(Hess f(ξ))",
    ),
    def(
        "div-phi-expansion",
        Asserted,
        Base,
        IDENTITY_TOL,
        "div((1/φ)df⊗dφ) expansion",
    ),
    def(
        "div-mu-expansion",
        Asserted,
        Base,
        IDENTITY_TOL,
        "div(μ df⊗df) expansion",
    ),
    def(
        "div-hess-condition",
        ReportOnly,
        Base,
        IDENTITY_TOL,
        "(div Hess f)(ξ) against the displayed right side",
    ),
    def(
        "div-hess-split",
        ReportOnly,
        Base,
        IDENTITY_TOL,
        "divergence of the tensor condition, cross terms split",
    ),
    def(
        "div-hess-xi-condition",
        ReportOnly,
        Base,
        IDENTITY_TOL,
        "div(Hess f(ξ)) against the displayed right side",
    ),
    def(
        "divergence-theorem",
        Asserted,
        Compact,
        QUADRATURE_TOL,
        "∫Δf",
    ),
    def(
        "integration-by-parts",
        Asserted,
        Compact,
        QUADRATURE_TOL,
        "∫ξ(|ξ|²) + ∫|ξ|²Δf",
    ),
    def(
        "traceless-chain",
        Asserted,
        Compact,
        QUADRATURE_TOL,
        "∫|Hess°|² - ∫|Hess|² + ∫(Δf)²/n",
    ),
    def(
        "aggregate-identity",
        ReportOnly,
        Compact,
        QUADRATURE_TOL,
        "integrated divergence identity, five terms",
    ),
    def(
        "rigidity-trials",
        ReportOnly,
        Compact,
        QUADRATURE_TOL,
        "‖Hess f + μ df⊗df‖ relative size",
    ),
];

pub fn lookup(id: &str) -> Option<&'static CheckDef> {
    REGISTRY.iter().find(|d| d.id == id)
}

/// Residual magnitudes of one check, indexed by sample point where the check
/// is pointwise.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub residuals: Vec<(Option<usize>, f64)>,
    pub skipped: usize,
    pub detail: Option<Value>,
}

impl Outcome {
    fn pointwise(values: Vec<f64>) -> Self {
        Outcome {
            residuals: values
                .into_iter()
                .enumerate()
                .map(|(i, v)| (Some(i), v))
                .collect(),
            ..Outcome::default()
        }
    }

    fn single(value: f64, detail: Option<Value>) -> Self {
        Outcome {
            residuals: vec![(None, value)],
            skipped: 0,
            detail,
        }
    }
}

fn missing(what: &str) -> Error {
    Error::Precondition(format!("needs field `{what}`"))
}

/// The soliton data of a model, with fields lifted to the sample chart.
pub fn soliton_instance(model: &Model) -> Result<SolitonInstance> {
    let lambda = model
        .field_on_samples("lambda")?
        .ok_or_else(|| missing("lambda"))?;
    let mu = model.field_on_samples("mu")?.ok_or_else(|| missing("mu"))?;
    let g = model.metric.clone();
    if let Some(f) = model.field_on_samples("f")? {
        return Ok(SolitonInstance::gradient(g, f, lambda, mu));
    }
    match model.vector_fields.get("xi") {
        Some(xi) => Ok(SolitonInstance::with_field(g, xi.clone(), lambda, mu)),
        None => Err(Error::Precondition(
            "needs field `f` or vector field `xi`".into(),
        )),
    }
}

fn worst(rs: impl IntoIterator<Item = Residual>) -> f64 {
    rs.into_iter().fold(0.0f64, |m, r| m.max(r.normalized()))
}

/// Evaluation state for one scenario run. Expensive shared results are
/// computed at most once.
pub struct Context<'a> {
    model: &'a Model,
    order: usize,
    warped_points: OnceCell<Vec<WarpedSolitonReport>>,
    compact: OnceCell<CompactReport>,
}

impl<'a> Context<'a> {
    pub fn new(model: &'a Model, order: usize) -> Self {
        Context {
            model,
            order,
            warped_points: OnceCell::new(),
            compact: OnceCell::new(),
        }
    }

    fn points(&self) -> &[Vec<f64>] {
        &self.model.points
    }

    fn each(&self, f: impl Fn(&[f64]) -> Result<f64>) -> Result<Outcome> {
        Ok(Outcome::pointwise(
            self.points().iter().map(|p| f(p)).collect::<Result<_>>()?,
        ))
    }

    fn geo(&self, p: &[f64]) -> Result<PointGeometry> {
        PointGeometry::new(&self.model.metric, p, self.order)
    }

    fn sample_field(&self, name: &str) -> Result<ScalarField> {
        self.model
            .field_on_samples(name)?
            .ok_or_else(|| missing(name))
    }

    fn base_field(&self, name: &str) -> Result<&ScalarField> {
        self.model.field(name).ok_or_else(|| missing(name))
    }

    fn with_potential(
        &self,
        f: impl Fn(&PointGeometry, &Jet) -> Result<Residual>,
    ) -> Result<Outcome> {
        let field = self.sample_field("f")?;
        self.each(|p| {
            let geo = self.geo(p)?;
            let fj = geo.scalar(&field)?;
            Ok(f(&geo, &fj)?.normalized())
        })
    }

    fn instance(&self) -> Result<SolitonInstance> {
        soliton_instance(self.model)
    }

    fn soliton(&self, f: impl Fn(&SolitonPoint) -> Result<Residual>) -> Result<Outcome> {
        let inst = self.instance()?;
        self.each(|p| Ok(f(&inst.at_order(p, self.order)?)?.normalized()))
    }

    fn warped_reports(&self) -> Result<&[WarpedSolitonReport]> {
        if let Some(r) = self.warped_points.get() {
            return Ok(r);
        }
        let wp = self
            .model
            .warped
            .as_ref()
            .ok_or_else(|| Error::Precondition("needs a warped product".into()))?;
        let (f, lambda, mu) = (
            self.base_field("f")?,
            self.base_field("lambda")?,
            self.base_field("mu")?,
        );
        let reps = self
            .points()
            .iter()
            .map(|p| {
                verify_warped_soliton(wp, f, lambda, mu, std::slice::from_ref(p), f64::INFINITY)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.warped_points.get_or_init(|| reps))
    }

    fn warped(&self, pick: impl Fn(&WarpedSolitonReport) -> Residual) -> Result<Outcome> {
        Ok(Outcome::pointwise(
            self.warped_reports()?
                .iter()
                .map(|r| pick(r).normalized())
                .collect(),
        ))
    }

    /// Base metric, base points and warping function.
    fn base(&self) -> Result<(&MetricPatch, Vec<Vec<f64>>, &ScalarField)> {
        match &self.model.warped {
            Some(wp) => Ok((
                wp.base(),
                self.points()
                    .iter()
                    .map(|p| wp.split(p).0.to_vec())
                    .collect(),
                wp.warping(),
            )),
            None => Ok((
                &self.model.metric,
                self.points().to_vec(),
                self.base_field("phi")?,
            )),
        }
    }

    fn tensor_condition(
        &self,
        pick: impl Fn(&TensorConditionReport) -> Residual,
    ) -> Result<Outcome> {
        let (g, pts, phi) = self.base()?;
        let (f, mu) = (self.base_field("f")?, self.base_field("mu")?);
        let vals = pts
            .iter()
            .map(|p| Ok(pick(&tensor_condition_residual(g, f, mu, phi, p)?).normalized()))
            .collect::<Result<_>>()?;
        Ok(Outcome::pointwise(vals))
    }

    fn divergence(&self, pick: impl Fn(&DivergenceIdentities) -> Residual) -> Result<Outcome> {
        let (g, pts, phi) = self.base()?;
        let (f, mu) = (self.base_field("f")?, self.base_field("mu")?);
        let vals = pts
            .iter()
            .map(|p| Ok(pick(&divergence_identities(g, f, mu, phi, p)?).normalized()))
            .collect::<Result<_>>()?;
        Ok(Outcome::pointwise(vals))
    }

    fn compact(&self) -> Result<&CompactReport> {
        if let Some(r) = self.compact.get() {
            return Ok(r);
        }
        let m = self.model;
        let chart = m
            .periodic
            .clone()
            .ok_or_else(|| Error::Precondition("needs a periodic block".into()))?;
        let f = self.base_field("f")?.clone();
        let mu_field = self.base_field("mu")?;
        let values = self
            .points()
            .iter()
            .map(|p| mu_field.eval(p))
            .collect::<Result<Vec<_>>>()?;
        let mu = values
            .first()
            .copied()
            .unwrap_or(mu_field.eval(&vec![0.0; m.metric.dim()])?);
        if values
            .iter()
            .any(|v| (v - mu).abs() > 1e-12 * (1.0 + mu.abs()))
        {
            return Err(Error::Precondition(
                "integral checks need a constant `mu`".into(),
            ));
        }
        let phi = match m.field("phi") {
            Some(p) => p.clone(),
            None => ScalarField::constant(m.metric.chart(), 1.0),
        };
        let trials = m.scenario.periodic.as_ref().map_or(0, |p| p.trials);
        let inst = TorusInstance {
            chart,
            metric: m.metric.clone(),
            f,
            mu,
            phi,
        };
        let rep = compact_integral_checks(&inst, trials, m.seed)?;
        Ok(self.compact.get_or_init(|| rep))
    }

    pub fn evaluate(&self, id: &str) -> Result<Outcome> {
        match id {
            "scalar-curvature" => {
                let expected = self.sample_field("scal_expected")?;
                self.each(|p| Ok((self.geo(p)?.scal().value() - expected.eval(p)?).abs()))
            }
            "riemann-symmetries" => {
                self.each(|p| Ok(identities::riemann_symmetries(&self.geo(p)?).normalized()))
            }
            "metric-compatibility" => {
                self.each(|p| Ok(identities::metric_compatibility(&self.geo(p)?)?.normalized()))
            }
            "contracted-bianchi" => {
                self.each(|p| Ok(identities::contracted_bianchi(&self.geo(p)?)?.normalized()))
            }
            "hessian-symmetry" => self.with_potential(identities::hessian_symmetry),
            "traceless-hessian" => self.with_potential(identities::traceless_hessian),
            "bochner-lemma-a" => self.with_potential(identities::bochner_lemma_a),
            "bochner-lemma-b" => self.with_potential(identities::bochner_lemma_b),
            "oracle-metric" => self.oracle_metric(),
            "oracle-scalar-curvature" => self.oracle_scal(),

            "soliton-residual" => self.soliton(|s| Ok(s.soliton_residual()?.residual())),
            "gradient-soliton-residual" => {
                self.soliton(|s| Ok(s.gradient_soliton_residual()?.residual()))
            }
            "nabla-xi-residual" => self.soliton(|s| Ok(s.nabla_xi_residual()?.residual())),
            "generalized-geodesic" => {
                self.soliton(|s| Ok(s.generalized_geodesic_residual()?.residual()))
            }
            "trace-identity" => self.soliton(SolitonPoint::trace_identity_residual),
            "pairing-identity" => self.soliton(SolitonPoint::pairing_identity_residual),
            "lambda-quadratic" => self.soliton(SolitonPoint::lambda_quadratic),
            "lambda-quadratic-printed" => self.soliton(SolitonPoint::lambda_quadratic_printed),
            "bochner-formula" => self.soliton(SolitonPoint::bochner_residual),
            "ricci-contraction" => {
                self.soliton(|s| Ok(s.ricci_contraction_identities()?.res_nn.residual()))
            }
            "ricci-contraction-scalar" => {
                self.soliton(|s| Ok(s.ricci_contraction_identities()?.res_j_contracted))
            }
            "ricci-contraction-printed" => {
                self.soliton(|s| Ok(s.ricci_contraction_identities()?.res_j))
            }
            "grad-scal-alignment" => self.alignment(),
            "maximum-principle" => self.maximum_principle(),
            "constant-scal" => self.constant_scal(),
            "fit-constants" => {
                let fit = fit_constants(&self.instance()?, self.points())?;
                Ok(Outcome::single(fit.max_residual, Some(json!(fit))))
            }
            "paper-constants-audit" => self.soliton(|s| match s.potential() {
                Some(_) => Ok(s.gradient_soliton_residual()?.residual()),
                None => Ok(s.soliton_residual()?.residual()),
            }),

            "warped-scal" => {
                let wp = self
                    .model
                    .warped
                    .as_ref()
                    .ok_or_else(|| missing("warped"))?;
                self.each(|p| Ok(warped_scal_crosscheck(wp, p)?.normalized()))
            }
            "lift" => {
                let wp = self
                    .model
                    .warped
                    .as_ref()
                    .ok_or_else(|| missing("warped"))?;
                let f = self.base_field("f")?;
                self.each(|p| {
                    let r = lift_checks(wp, f, std::slice::from_ref(&p.to_vec()))?;
                    Ok(worst([r.gradient, r.hessian]))
                })
            }
            "warped-base-condition" => self.warped(|r| r.base_condition_max),
            "warped-fiber-scal" => {
                let mut out = self.warped(|r| r.fiber_scal_mismatch)?;
                let req: Vec<f64> = self
                    .warped_reports()?
                    .iter()
                    .map(|r| r.fiber_scal_required)
                    .collect();
                let lo = req.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = req.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mean = req.iter().sum::<f64>() / req.len().max(1) as f64;
                out.detail = Some(json!({ "required_mean": mean, "required_spread": hi - lo }));
                Ok(out)
            }
            "warped-base-soliton" => self.warped(|r| r.base_residual_max),
            "warped-product-soliton" => self.warped(|r| r.product_residual_max),
            "warped-fiber-hessian" => self.warped(|r| r.fiber_hessian_max),
            "warped-reduction" => self.warped(|r| r.reduction_max),

            "tensor-condition" => self.tensor_condition(|r| r.residual.residual()),
            "tensor-condition-trace" => self.tensor_condition(|r| r.trace_vs_scalar_condition),
            "tensor-condition-nabla-xi" => self.tensor_condition(|r| r.nabla_xi_audit.residual()),
            "hessian-divergence" => self.divergence(|d| d.hessian_divergence),
            "div-phi-expansion" => self.divergence(|d| d.div_phi_aux),
            "div-mu-expansion" => self.divergence(|d| d.div_mu_aux),
            "div-hess-condition" => self.divergence(|d| d.div_hess_condition),
            "div-hess-split" => self.divergence(|d| d.div_hess_split),
            "div-hess-xi-condition" => self.divergence(|d| d.div_hess_xi_condition),

            "divergence-theorem" => Ok(Outcome::single(
                self.compact()?.divergence_theorem.value.abs(),
                None,
            )),
            "integration-by-parts" => Ok(Outcome::single(
                self.compact()?.integration_by_parts.value.abs(),
                None,
            )),
            "traceless-chain" => Ok(Outcome::single(
                self.compact()?.traceless_chain.value.abs(),
                None,
            )),
            "aggregate-identity" => {
                let c = self.compact()?;
                Ok(Outcome::single(
                    c.aggregate.residual.value.abs(),
                    Some(
                        json!({ "terms": c.aggregate.terms, "trajectory": c.aggregate_trajectory }),
                    ),
                ))
            }
            "rigidity-trials" => {
                let c = self.compact()?;
                Ok(Outcome::single(
                    c.rigidity,
                    Some(json!({
                        "trial_min_rigidity": c.trial_min_rigidity,
                        "trials": c.trials,
                        "mu_estimate": c.mu_estimate,
                        "nabla_xi_l2": c.nabla_xi_l2,
                        "traceless_mu_term": c.traceless_mu_term,
                        "mu2_xi4": c.mu2_xi4,
                    })),
                ))
            }
            other => Err(Error::Precondition(format!("no evaluator for `{other}`"))),
        }
    }

    fn oracle_metric(&self) -> Result<Outcome> {
        let g = &self.model.metric;
        let n = g.dim();
        let space = JetSpace::new(n, 2)?;
        self.each(|p| {
            let mut err = 0.0f64;
            for i in 0..n {
                for j in i..n {
                    let c = g.component(i, j);
                    let jet = c.eval_jet(&space, p, 2)?;
                    let (grad, hess) = oracle::partials(&|q: &[f64]| c.eval(q), p, DEFAULT_STEP)?;
                    err = err.max(compare_partials(&jet, &grad, &hess)?);
                }
            }
            Ok(err)
        })
    }

    fn oracle_scal(&self) -> Result<Outcome> {
        let g = &self.model.metric;
        self.each(|p| {
            let scal = self.geo(p)?.scal().clone();
            let (grad, hess) = oracle::scalar_curvature_partials(g, p, DEFAULT_STEP)?;
            compare_partials(&scal, &grad, &hess)
        })
    }

    fn alignment(&self) -> Result<Outcome> {
        let inst = self.instance()?;
        let mut out = Outcome::default();
        for (i, p) in self.points().iter().enumerate() {
            match inst.at_order(p, self.order)?.grad_scal_alignment_residual() {
                Ok(a) => out
                    .residuals
                    .push((Some(i), a.residual.residual().normalized())),
                Err(Error::Precondition(_)) => out.skipped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    fn maximum_principle(&self) -> Result<Outcome> {
        let inst = self.instance()?;
        let mut out = Outcome::default();
        let mut hypothesis = 0usize;
        for (i, p) in self.points().iter().enumerate() {
            let m = inst
                .at_order(p, self.order)?
                .maximum_principle_inequality(IDENTITY_TOL)?;
            hypothesis += m.hypothesis as usize;
            let violation = if m.hypothesis && !m.bound_ok {
                -m.lhs
            } else {
                0.0
            };
            out.residuals.push((Some(i), violation));
        }
        out.detail = Some(json!({ "hypothesis_points": hypothesis }));
        Ok(out)
    }

    fn constant_scal(&self) -> Result<Outcome> {
        let rep = constant_scal_check(&self.instance()?, self.points(), self.order)?;
        let mut out = Outcome::pointwise(
            rep.points
                .iter()
                .map(|t| t.hess_identity.normalized())
                .collect(),
        );
        out.detail = Some(json!({
            "unit_xi_max": rep.unit_xi_max,
            "xi_xi_scal_max": rep.xi_xi_scal_max,
            "hess_scal_xi_max": rep.hess_scal_xi_max,
            "scal_spread": rep.scal_spread,
            "hypotheses_hold": rep.hypotheses_hold(IDENTITY_TOL),
        }));
        Ok(out)
    }
}

/// Largest relative gap between jet partials and finite differences.
fn compare_partials(jet: &Jet, grad: &[f64], hess: &[f64]) -> Result<f64> {
    let n = grad.len();
    let mut err = 0.0f64;
    let mut alpha = vec![0u8; n];
    for i in 0..n {
        alpha[i] += 1;
        err = err.max(relative_error(jet.derivative(&alpha)?, grad[i]));
        for j in i..n {
            alpha[j] += 1;
            err = err.max(relative_error(jet.derivative(&alpha)?, hess[i * n + j]));
            alpha[j] -= 1;
        }
        alpha[i] -= 1;
    }
    Ok(err)
}
