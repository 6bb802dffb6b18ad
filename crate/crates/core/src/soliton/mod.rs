//! Soliton residuals and the identities derived from them.
//!
//! A [`SolitonInstance`] is evaluated at one point through
//! [`SolitonInstance::at`], which returns a [`SolitonPoint`] holding jets
//! of every ingredient. All identities are then signed residuals: they are
//! computed on arbitrary data and only expected to vanish when the soliton
//! equation itself holds at the same point.

mod fit;
mod instance;

pub use fit::{fit_constants, FitResult};
pub use instance::{Potential, SolitonInstance};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprjet::Jet;
use crate::geometry::{PointGeometry, Residual, Slot, TensorValue};

/// Tensor-valued residual with the magnitude of the terms that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualTensor {
    pub tensor: TensorValue,
    pub scale: f64,
}

impl ResidualTensor {
    /// ‖tensor‖∞ against its scale.
    pub fn residual(&self) -> Residual {
        Residual::new(self.tensor.max_abs(), self.scale)
    }
}

/// Vector-valued residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualVector {
    pub components: Vec<f64>,
    pub scale: f64,
}

impl ResidualVector {
    pub fn residual(&self) -> Residual {
        let v = self.components.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        Residual::new(v, self.scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldClass {
    pub torse_forming: bool,
    pub concircular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPrinciple {
    /// Δ(|ξ|²).
    pub lhs: f64,
    /// S(ξ,ξ) ≤ (n−1)|∇ξ|² at the point.
    pub hypothesis: bool,
    /// Δ(|ξ|²) ≥ −tol.
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alignment {
    pub residual: ResidualVector,
    /// ξ(scal)/|ξ|².
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciContraction {
    /// Qξ − [−(n−1)grad scal + (n−1)μ(λ−scal)ξ].
    pub res_nn: ResidualVector,
    /// S(ξ,ξ) − [−(n−1)ξ(scal) + (n−1)μ(λ−scal)], as displayed.
    pub res_j: Residual,
    /// Same with the |ξ|² factor that contracting the vector identity gives.
    pub res_j_contracted: Residual,
}

/// Pointwise quantities entering the constant-scalar-curvature theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantScalPoint {
    pub scal: f64,
    /// |ξ|² − 1.
    pub unit_xi: f64,
    /// ξ(ξ(scal)).
    pub xi_xi_scal: f64,
    /// max_j |Hess(scal)(ξ, ∂_j)|.
    pub hess_scal_xi: f64,
    /// Hess(scal)(ξ,ξ) − ξ(ξ(scal)) + (∇_ξ ξ)(scal).
    pub hess_identity: Residual,
}

/// Every ingredient of a soliton at one point, as jets.
#[derive(Debug, Clone)]
pub struct SolitonPoint {
    geo: PointGeometry,
    f: Option<Jet>,
    xi: Vec<Jet>,
    eta: Vec<Jet>,
    lambda: Jet,
    mu: Jet,
}

fn max_abs_jets(js: &[Jet]) -> f64 {
    js.iter().fold(0.0f64, |m, j| m.max(j.value().abs()))
}

fn values(js: &[Jet]) -> Vec<f64> {
    js.iter().map(Jet::value).collect()
}

impl SolitonPoint {
    /// Assembles a point from precomputed jets. `eta` defaults to the g-dual
    /// of `xi`.
    pub fn from_parts(
        geo: PointGeometry,
        f: Option<Jet>,
        xi: Vec<Jet>,
        eta: Option<Vec<Jet>>,
        lambda: Jet,
        mu: Jet,
    ) -> Result<Self> {
        let n = geo.dim();
        if xi.len() != n || eta.as_ref().is_some_and(|e| e.len() != n) {
            return Err(Error::Shape(format!(
                "field components do not match dimension {n}"
            )));
        }
        let eta = eta.unwrap_or_else(|| geo.lower(&xi));
        Ok(SolitonPoint {
            geo,
            f,
            xi,
            eta,
            lambda,
            mu,
        })
    }

    pub fn geometry(&self) -> &PointGeometry {
        &self.geo
    }

    pub fn xi(&self) -> &[Jet] {
        &self.xi
    }

    pub fn eta(&self) -> &[Jet] {
        &self.eta
    }

    pub fn lambda(&self) -> &Jet {
        &self.lambda
    }

    pub fn mu(&self) -> &Jet {
        &self.mu
    }

    pub fn potential(&self) -> Option<&Jet> {
        self.f.as_ref()
    }

    fn n(&self) -> usize {
        self.geo.dim()
    }

    fn require_gradient(&self) -> Result<&Jet> {
        self.f
            .as_ref()
            .ok_or_else(|| Error::Precondition("instance is not of gradient type".into()))
    }

    /// λ − scal.
    fn lambda_minus_scal(&self) -> Jet {
        self.lambda.sub(self.geo.scal())
    }

    fn tensor(&self, jets: &[Jet], scale: f64) -> Result<ResidualTensor> {
        Ok(ResidualTensor {
            tensor: TensorValue::symmetric(self.geo.point(), self.n(), values(jets))?,
            scale,
        })
    }

    /// A + (λ − scal)g + μ η⊗η for a symmetric (0,2) tensor A.
    fn complete(&self, a: &[Jet]) -> Result<ResidualTensor> {
        let lms = self.lambda_minus_scal();
        let g_term: Vec<Jet> = self.geo.metric().iter().map(|g| g.mul(&lms)).collect();
        let eta_term: Vec<Jet> = self
            .geo
            .outer(&self.eta, &self.eta)
            .iter()
            .map(|e| e.mul(&self.mu))
            .collect();
        let total: Vec<Jet> = a
            .iter()
            .zip(&g_term)
            .zip(&eta_term)
            .map(|((x, y), z)| x.add(y).add(z))
            .collect();
        let scale = max_abs_jets(a)
            .max(max_abs_jets(&g_term))
            .max(max_abs_jets(&eta_term));
        self.tensor(&total, scale)
    }

    /// ½L_ξ g + (λ − scal)g + μ η⊗η.
    pub fn soliton_residual(&self) -> Result<ResidualTensor> {
        let half_lie: Vec<Jet> = self
            .geo
            .lie_derivative_metric(&self.xi)?
            .iter()
            .map(|j| j.scale(0.5))
            .collect();
        self.complete(&half_lie)
    }

    /// Hess f + (λ − scal)g + μ df⊗df.
    pub fn gradient_soliton_residual(&self) -> Result<ResidualTensor> {
        let f = self.require_gradient()?;
        self.complete(&self.geo.hessian(f)?)
    }

    /// ∇ξ + (λ − scal)I + μ df⊗ξ as a (1,1) tensor, `[i][j]` = component i of
    /// the image of ∂_j.
    pub fn nabla_xi_residual(&self) -> Result<ResidualTensor> {
        let f = self.require_gradient()?;
        let n = self.n();
        let nabla = self.geo.nabla_vector(&self.xi)?;
        let df = self.geo.differential(f)?;
        let lms = self.lambda_minus_scal();
        let mut data = Vec::with_capacity(n * n);
        let mut scale = max_abs_jets(&nabla).max(lms.value().abs());
        for i in 0..n {
            for j in 0..n {
                let outer = df[j].mul(&self.xi[i]).mul(&self.mu);
                scale = scale.max(outer.value().abs());
                let mut v = nabla[i * n + j].add(&outer);
                if i == j {
                    v = v.add(&lms);
                }
                data.push(v.value());
            }
        }
        Ok(ResidualTensor {
            tensor: TensorValue::new(self.geo.point(), n, vec![Slot::Contra, Slot::Co], data)?,
            scale,
        })
    }

    /// ∇_ξ ξ − [Δf + (n−1)(λ − scal)]ξ.
    pub fn generalized_geodesic_residual(&self) -> Result<ResidualVector> {
        let f = self.require_gradient()?;
        let n = self.n() as f64;
        let along = self.geo.covariant_along(&self.xi, &self.xi)?;
        let potential = self
            .geo
            .laplacian(f)?
            .add(&self.lambda_minus_scal().scale(n - 1.0));
        let rhs: Vec<Jet> = self.xi.iter().map(|x| x.mul(&potential)).collect();
        Ok(ResidualVector {
            components: along
                .iter()
                .zip(&rhs)
                .map(|(a, b)| a.value() - b.value())
                .collect(),
            scale: max_abs_jets(&along).max(max_abs_jets(&rhs)),
        })
    }

    /// Torse-forming when (λ, μ) ≈ (scal − 1, 1); concircular when μ ≈ 0.
    pub fn classify_field(&self, tol: f64) -> FieldClass {
        let scal = self.geo.scal().value();
        let (l, m) = (self.lambda.value(), self.mu.value());
        FieldClass {
            torse_forming: (l - (scal - 1.0)).abs() <= tol * (1.0 + scal.abs())
                && (m - 1.0).abs() <= tol,
            concircular: m.abs() <= tol,
        }
    }

    /// Δf + n(λ − scal) + μ|ξ|².
    pub fn trace_identity_residual(&self) -> Result<Residual> {
        let f = self.require_gradient()?;
        let n = self.n() as f64;
        let terms = [
            self.geo.laplacian(f)?.value(),
            n * self.lambda_minus_scal().value(),
            self.mu.value() * self.geo.inner(&self.xi, &self.xi).value(),
        ];
        Ok(sum_terms(&terms))
    }

    /// |Hess f|² + (λ − scal)Δf + (μ/2)ξ(|ξ|²).
    pub fn pairing_identity_residual(&self) -> Result<Residual> {
        let f = self.require_gradient()?;
        let hess = self.geo.hessian(f)?;
        let norm2 = self.geo.inner(&self.xi, &self.xi);
        let terms = [
            self.geo.inner2(&hess, &hess).value(),
            self.lambda_minus_scal().value() * self.geo.trace(&hess).value(),
            0.5 * self.mu.value() * self.geo.directional(&self.xi, &norm2)?.value(),
        ];
        Ok(sum_terms(&terms))
    }

    /// (|Hess f|², |ξ|², ξ(|ξ|²)) at the point.
    fn quadratic_inputs(&self) -> Result<(f64, f64, f64)> {
        let f = self.require_gradient()?;
        let hess = self.geo.hessian(f)?;
        let norm2 = self.geo.inner(&self.xi, &self.xi);
        Ok((
            self.geo.inner2(&hess, &hess).value(),
            norm2.value(),
            self.geo.directional(&self.xi, &norm2)?.value(),
        ))
    }

    /// n(λ−scal)² + μ|ξ|²(λ−scal) − |Hess f|² − (μ/2)ξ(|ξ|²), obtained by
    /// eliminating Δf between the trace and pairing identities.
    pub fn lambda_quadratic(&self) -> Result<Residual> {
        let (h2, x2, dx2) = self.quadratic_inputs()?;
        let n = self.n() as f64;
        let (l, s, m) = (
            self.lambda.value(),
            self.geo.scal().value(),
            self.mu.value(),
        );
        let d = l - s;
        Ok(sum_terms(&[n * d * d, m * x2 * d, -h2, -0.5 * m * dx2]))
    }

    /// nλ² + (2n·scal + μ|ξ|²)λ + n·scal² + μ|ξ|²scal − (μ/2)ξ(|ξ|²) − |Hess f|²,
    /// the quadratic with the signs as commonly printed. Kept for auditing.
    pub fn lambda_quadratic_printed(&self) -> Result<Residual> {
        let (h2, x2, dx2) = self.quadratic_inputs()?;
        let n = self.n() as f64;
        let (l, s, m) = (
            self.lambda.value(),
            self.geo.scal().value(),
            self.mu.value(),
        );
        Ok(sum_terms(&[
            n * l * l,
            (2.0 * n * s + m * x2) * l,
            n * s * s,
            m * x2 * s,
            -0.5 * m * dx2,
            -h2,
        ]))
    }

    /// μ²|ξ|⁴ + 2nμ·ξ(|ξ|²) + 4n|Hess f|².
    pub fn lambda_discriminant(&self) -> Result<f64> {
        let (h2, x2, dx2) = self.quadratic_inputs()?;
        let n = self.n() as f64;
        let m = self.mu.value();
        Ok(m * m * x2 * x2 + 2.0 * n * m * dx2 + 4.0 * n * h2)
    }

    /// LHS − RHS of the Bochner-type formula for gradient solitons.
    pub fn bochner_residual(&self) -> Result<Residual> {
        self.require_gradient()?;
        let n = self.n();
        if n < 2 {
            return Err(Error::Precondition(
                "the Bochner-type formula needs dimension at least 2".into(),
            ));
        }
        let nf = n as f64;
        let k = nf - 1.0;
        let norm2 = self.geo.inner(&self.xi, &self.xi);
        let half_lap = 0.5 * self.geo.laplacian(&norm2)?.value();
        let nabla2 = self
            .geo
            .norm2_mixed(&self.geo.nabla_vector(&self.xi)?)
            .value();
        let s_xi = self
            .geo
            .bilinear(self.geo.ricci(), &self.xi, &self.xi)
            .value();
        let (l, s, m) = (
            self.lambda.value(),
            self.geo.scal().value(),
            self.mu.value(),
        );
        let x2 = norm2.value();
        let dx2 = self.geo.directional(&self.xi, &norm2)?.value();
        let dmu = self.geo.directional(&self.xi, &self.mu)?.value();
        let bracket = [
            dmu,
            -(nf / k) * m * m * x2,
            -(nf * nf / k) * l * m,
            (nf * nf / k) * m * s,
        ];
        let mut terms = vec![
            half_lap,
            -nabla2,
            s_xi / k,
            (nf - 2.0) / (2.0 * k) * m * dx2,
        ];
        terms.extend(bracket.iter().map(|b| x2 * b));
        Ok(sum_terms(&terms))
    }

    /// Pointwise content of the maximum-principle argument; requires μ = 0.
    pub fn maximum_principle_inequality(&self, tol: f64) -> Result<MaxPrinciple> {
        self.require_gradient()?;
        if self.mu.value().abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "maximum-principle inequality needs mu = 0, got {}",
                self.mu.value()
            )));
        }
        let k = self.n() as f64 - 1.0;
        let norm2 = self.geo.inner(&self.xi, &self.xi);
        let lhs = self.geo.laplacian(&norm2)?.value();
        let s_xi = self
            .geo
            .bilinear(self.geo.ricci(), &self.xi, &self.xi)
            .value();
        let nabla2 = self
            .geo
            .norm2_mixed(&self.geo.nabla_vector(&self.xi)?)
            .value();
        Ok(MaxPrinciple {
            lhs,
            hypothesis: s_xi <= k * nabla2 + tol * (1.0 + s_xi.abs() + k * nabla2),
            bound_ok: lhs >= -tol * (1.0 + lhs.abs()),
        })
    }

    /// grad(scal) − h·ξ with h = ξ(scal)/|ξ|²; needs ξ away from zero.
    pub fn grad_scal_alignment_residual(&self) -> Result<Alignment> {
        let x2 = self.geo.inner(&self.xi, &self.xi).value();
        let gscale = max_abs_jets(self.geo.metric());
        if x2 <= 1e-8 * (1.0 + gscale) {
            return Err(Error::Precondition(format!(
                "xi vanishes at {:?} (|xi|^2 = {x2:e})",
                self.geo.point()
            )));
        }
        let grad = values(&self.geo.grad(self.geo.scal())?);
        let h = self.geo.directional(&self.xi, self.geo.scal())?.value() / x2;
        let xi = values(&self.xi);
        let components: Vec<f64> = grad.iter().zip(&xi).map(|(g, x)| g - h * x).collect();
        let scale = grad
            .iter()
            .chain(&xi)
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(h.abs());
        Ok(Alignment {
            residual: ResidualVector { components, scale },
            h,
        })
    }

    /// Audits of the Ricci-operator expressions in ξ under this crate's
    /// curvature conventions.
    pub fn ricci_contraction_identities(&self) -> Result<RicciContraction> {
        let k = self.n() as f64 - 1.0;
        let q_xi = self.geo.apply(&self.geo.ricci_operator(), &self.xi);
        let grad_scal = self.geo.grad(self.geo.scal())?;
        let coeff = self.mu.mul(&self.lambda_minus_scal()).scale(k);
        let rhs: Vec<Jet> = grad_scal
            .iter()
            .zip(&self.xi)
            .map(|(g, x)| g.scale(-k).add(&coeff.mul(x)))
            .collect();
        let res_nn = ResidualVector {
            components: q_xi
                .iter()
                .zip(&rhs)
                .map(|(a, b)| a.value() - b.value())
                .collect(),
            scale: max_abs_jets(&q_xi).max(max_abs_jets(&rhs)),
        };
        let s_xi = self
            .geo
            .bilinear(self.geo.ricci(), &self.xi, &self.xi)
            .value();
        let xi_scal = self.geo.directional(&self.xi, self.geo.scal())?.value();
        let x2 = self.geo.inner(&self.xi, &self.xi).value();
        let c = coeff.value();
        Ok(RicciContraction {
            res_nn,
            res_j: sum_terms(&[s_xi, k * xi_scal, -c]),
            res_j_contracted: sum_terms(&[s_xi, k * xi_scal, -c * x2]),
        })
    }

    /// Hypothesis quantities of the constant-scalar-curvature theorem.
    pub fn constant_scal_point(&self) -> Result<ConstantScalPoint> {
        let scal = self.geo.scal();
        let hess = self.geo.hessian(scal)?;
        let xi_scal = self.geo.directional(&self.xi, scal)?;
        let xi_xi_scal = self.geo.directional(&self.xi, &xi_scal)?.value();
        let hess_xi = self.geo.contract_first(&hess, &self.xi);
        let hess_xixi = self.geo.bilinear(&hess, &self.xi, &self.xi).value();
        let along = self.geo.covariant_along(&self.xi, &self.xi)?;
        let along_scal = self.geo.directional(&along, scal)?.value();
        Ok(ConstantScalPoint {
            scal: scal.value(),
            unit_xi: self.geo.inner(&self.xi, &self.xi).value() - 1.0,
            xi_xi_scal,
            hess_scal_xi: max_abs_jets(&hess_xi),
            hess_identity: sum_terms(&[hess_xixi, -xi_xi_scal, along_scal]),
        })
    }
}

/// Signed sum with the largest term magnitude as scale.
pub(crate) fn sum_terms(terms: &[f64]) -> Residual {
    let value: f64 = terms.iter().sum();
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    Residual::new(value, scale)
}

/// Aggregate of the constant-scalar-curvature theorem over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantScalReport {
    pub points: Vec<ConstantScalPoint>,
    pub unit_xi_max: f64,
    pub xi_xi_scal_max: f64,
    pub hess_scal_xi_max: f64,
    pub hess_identity_max: Residual,
    /// max − min of scal over the samples.
    pub scal_spread: f64,
}

impl ConstantScalReport {
    pub fn hypotheses_hold(&self, tol: f64) -> bool {
        self.unit_xi_max <= tol && self.xi_xi_scal_max <= tol && self.hess_scal_xi_max <= tol
    }
}

/// Evaluates the theorem's hypotheses and its conclusion metric.
pub fn constant_scal_check(
    inst: &SolitonInstance,
    points: &[Vec<f64>],
    order: usize,
) -> Result<ConstantScalReport> {
    if inst.dim() < 2 {
        return Err(Error::Precondition(
            "constant-scalar-curvature check needs dimension at least 2".into(),
        ));
    }
    if order < 4 {
        return Err(Error::OrderExceeded {
            requested: 4,
            available: order,
        });
    }
    let mut report = ConstantScalReport {
        points: Vec::with_capacity(points.len()),
        unit_xi_max: 0.0,
        xi_xi_scal_max: 0.0,
        hess_scal_xi_max: 0.0,
        hess_identity_max: Residual::default(),
        scal_spread: 0.0,
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let t = inst.at_order(p, order)?.constant_scal_point()?;
        report.unit_xi_max = report.unit_xi_max.max(t.unit_xi.abs());
        report.xi_xi_scal_max = report.xi_xi_scal_max.max(t.xi_xi_scal.abs());
        report.hess_scal_xi_max = report.hess_scal_xi_max.max(t.hess_scal_xi);
        report.hess_identity_max = report.hess_identity_max.max(t.hess_identity);
        lo = lo.min(t.scal);
        hi = hi.max(t.scal);
        report.points.push(t);
    }
    if !points.is_empty() {
        report.scal_spread = hi - lo;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprjet::parse;
    use crate::geometry::{Chart, MetricPatch, ScalarField};

    fn field(g: &MetricPatch, src: &str) -> ScalarField {
        ScalarField::parse(g.chart(), src).unwrap()
    }

    fn gaussian() -> SolitonInstance {
        let g = MetricPatch::euclidean(3).unwrap();
        SolitonInstance::gradient(
            g.clone(),
            field(&g, "(x^2+y^2+z^2)/2"),
            field(&g, "-1"),
            field(&g, "0"),
        )
    }

    fn hyperbolic(lambda: &str, mu: &str) -> SolitonInstance {
        let chart = Chart::parse("H3", &["x", "y", "z"], &["z"]).unwrap();
        let g = MetricPatch::conformal(chart, &parse("z^(-2)").unwrap()).unwrap();
        SolitonInstance::gradient(
            g.clone(),
            field(&g, "-ln(z)"),
            field(&g, lambda),
            field(&g, mu),
        )
    }

    const P: [f64; 3] = [0.3, -0.7, 1.4];

    #[test]
    fn gaussian_is_exact() {
        let sp = gaussian().at(&P).unwrap();
        assert!(sp.soliton_residual().unwrap().residual().within(1e-12));
        assert!(sp
            .gradient_soliton_residual()
            .unwrap()
            .residual()
            .within(1e-12));
        assert!(sp.nabla_xi_residual().unwrap().residual().within(1e-12));
        assert!(sp
            .generalized_geodesic_residual()
            .unwrap()
            .residual()
            .within(1e-12));
        assert!(sp.trace_identity_residual().unwrap().within(1e-12));
        assert!(sp.pairing_identity_residual().unwrap().within(1e-12));
        assert!(sp.lambda_quadratic().unwrap().within(1e-12));
        assert!(sp.bochner_residual().unwrap().within(1e-12));
        let class = sp.classify_field(1e-9);
        assert!(class.concircular && !class.torse_forming);
        let mp = sp.maximum_principle_inequality(1e-9).unwrap();
        assert!(mp.hypothesis && mp.bound_ok && (mp.lhs - 6.0).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_fitted_constants_are_exact() {
        let sp = hyperbolic("-7", "1").at(&P).unwrap();
        assert!(sp
            .gradient_soliton_residual()
            .unwrap()
            .residual()
            .within(1e-12));
        assert!(sp.nabla_xi_residual().unwrap().residual().within(1e-12));
        assert!(sp
            .generalized_geodesic_residual()
            .unwrap()
            .residual()
            .within(1e-12));
        assert!(sp.trace_identity_residual().unwrap().within(1e-12));
        assert!(sp.pairing_identity_residual().unwrap().within(1e-12));
        assert!(sp.lambda_quadratic().unwrap().within(1e-12));
        assert!(sp.bochner_residual().unwrap().within(1e-12));
        assert!((sp.lambda_discriminant().unwrap() - 25.0).abs() < 1e-10);
        let rc = sp.ricci_contraction_identities().unwrap();
        assert!(rc.res_nn.residual().within(1e-12));
        assert!(rc.res_j.within(1e-12) && rc.res_j_contracted.within(1e-12));
    }

    #[test]
    fn printed_quadratic_misses_on_hyperbolic_space() {
        let sp = hyperbolic("-7", "1").at(&P).unwrap();
        let printed = sp.lambda_quadratic_printed().unwrap();
        assert!((printed.value - 492.0).abs() < 1e-9, "{printed:?}");
    }

    #[test]
    fn printed_constants_leave_a_residual() {
        let sp = hyperbolic("-8", "2").at(&P).unwrap();
        let z2 = P[2] * P[2];
        let r = sp.gradient_soliton_residual().unwrap().tensor;
        assert!((r.get(&[0, 0]) + 1.0 / z2).abs() < 1e-12);
        assert!((r.get(&[1, 1]) + 1.0 / z2).abs() < 1e-12);
        assert!(r.get(&[2, 2]).abs() < 1e-12);
        assert!((sp.trace_identity_residual().unwrap().value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn residual_is_affine_in_lambda() {
        let base = hyperbolic("-7", "1").at(&P).unwrap();
        let bumped = hyperbolic("-6", "1").at(&P).unwrap();
        let a = base.soliton_residual().unwrap().tensor;
        let b = bumped.soliton_residual().unwrap().tensor;
        let (g, _) = crate::geometry::metric_at(hyperbolic("0", "0").metric(), &P).unwrap();
        for k in 0..9 {
            assert!((b.data()[k] - a.data()[k] - g.data()[k]).abs() < 1e-12);
        }
        let nx = bumped.nabla_xi_residual().unwrap().tensor;
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((nx.get(&[i, j]) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fit_recovers_hand_constants() {
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![0.1 * i as f64, -0.2 * i as f64, 0.5 + 0.3 * i as f64])
            .collect();
        let fit = fit_constants(&hyperbolic("0", "0"), &pts).unwrap();
        assert!((fit.lambda + 7.0).abs() < 1e-9 && (fit.mu - 1.0).abs() < 1e-9);
        assert!(fit.identifiable() && fit.max_residual < 1e-9);
        let fit = fit_constants(&gaussian(), &pts).unwrap();
        assert!((fit.lambda + 1.0).abs() < 1e-10 && fit.mu.abs() < 1e-10);
        let g = MetricPatch::euclidean(2).unwrap();
        let flat =
            SolitonInstance::gradient(g.clone(), field(&g, "3"), field(&g, "0"), field(&g, "0"));
        let pts2: Vec<Vec<f64>> = pts.iter().map(|p| p[..2].to_vec()).collect();
        let fit = fit_constants(&flat, &pts2).unwrap();
        assert!(fit.lambda_identifiable && !fit.mu_identifiable);
        assert!(fit.lambda.abs() < 1e-12 && fit.mu == 0.0);
    }

    #[test]
    fn bochner_needs_two_dimensions() {
        let g = MetricPatch::euclidean(1).unwrap();
        let inst = SolitonInstance::gradient(
            g.clone(),
            field(&g, "x^2/2"),
            field(&g, "-1"),
            field(&g, "0"),
        );
        assert!(matches!(
            inst.at(&[0.5]).unwrap().bochner_residual(),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn alignment_rejects_vanishing_xi() {
        let sp = gaussian().at(&[0.0, 0.0, 0.0]).unwrap();
        assert!(sp.grad_scal_alignment_residual().is_err());
        let al = gaussian()
            .at(&P)
            .unwrap()
            .grad_scal_alignment_residual()
            .unwrap();
        assert!(al.residual.residual().within(1e-12) && al.h == 0.0);
    }

    #[test]
    fn constant_scal_on_space_form() {
        let inst = hyperbolic("-7", "1");
        let pts = vec![P.to_vec(), vec![1.0, 2.0, 0.6]];
        let rep = constant_scal_check(&inst, &pts, 4).unwrap();
        assert!(rep.hypotheses_hold(1e-9) && rep.scal_spread < 1e-9);
        assert!(rep.hess_identity_max.within(1e-9));
        assert!(constant_scal_check(&inst, &pts, 3).is_err());
    }

    #[test]
    fn non_gradient_instance() {
        let g = MetricPatch::euclidean(2).unwrap();
        let xi = crate::geometry::VectorField::parse(g.chart(), &["x", "y"]).unwrap();
        let inst = SolitonInstance::with_field(g.clone(), xi, field(&g, "-1"), field(&g, "0"));
        let sp = inst.at(&[0.4, 0.2]).unwrap();
        assert!(sp.soliton_residual().unwrap().residual().within(1e-12));
        assert!(sp.gradient_soliton_residual().is_err());
    }

    #[test]
    fn validate_flags_inconsistent_constant_coefficients() {
        let inst = hyperbolic("-7+z", "1").with_constant_coefficients(true);
        assert!(inst.validate(&[P.to_vec(), vec![0.0, 0.0, 2.0]]).is_err());
        assert!(hyperbolic("-7", "1").validate(&[P.to_vec()]).is_ok());
    }
}
