use crate::error::{Error, Result};
use crate::exprjet::DEFAULT_JET_ORDER;
use crate::geometry::{MetricPatch, OneForm, PointGeometry, ScalarField, VectorField};

use super::SolitonPoint;

/// What generates ξ.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// ξ = grad f.
    Gradient(ScalarField),
    /// ξ given by components.
    Field(VectorField),
}

/// Metric, potential and coefficient fields of a (candidate) soliton.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonInstance {
    metric: MetricPatch,
    potential: Potential,
    eta: Option<OneForm>,
    lambda: ScalarField,
    mu: ScalarField,
    constant_coefficients: bool,
}

impl SolitonInstance {
    /// Gradient instance ξ = grad f, η = df.
    pub fn gradient(
        metric: MetricPatch,
        f: ScalarField,
        lambda: ScalarField,
        mu: ScalarField,
    ) -> Self {
        Self::new(metric, Potential::Gradient(f), lambda, mu)
    }

    /// General instance with ξ given directly; η is the g-dual unless overridden.
    pub fn with_field(
        metric: MetricPatch,
        xi: VectorField,
        lambda: ScalarField,
        mu: ScalarField,
    ) -> Self {
        Self::new(metric, Potential::Field(xi), lambda, mu)
    }

    fn new(
        metric: MetricPatch,
        potential: Potential,
        lambda: ScalarField,
        mu: ScalarField,
    ) -> Self {
        let constant_coefficients =
            lambda.expr().coordinates().is_empty() && mu.expr().coordinates().is_empty();
        SolitonInstance {
            metric,
            potential,
            eta: None,
            lambda,
            mu,
            constant_coefficients,
        }
    }

    /// Replaces the default g-dual η.
    pub fn with_eta(mut self, eta: OneForm) -> Self {
        self.eta = Some(eta);
        self
    }

    /// Overrides the constant-coefficient flag, which is otherwise set when
    /// neither λ nor μ mentions a coordinate.
    pub fn with_constant_coefficients(mut self, flag: bool) -> Self {
        self.constant_coefficients = flag;
        self
    }

    /// Same data with other coefficient fields.
    pub fn with_coefficients(&self, lambda: ScalarField, mu: ScalarField) -> Self {
        let mut out = Self::new(self.metric.clone(), self.potential.clone(), lambda, mu);
        out.eta = self.eta.clone();
        out
    }

    pub fn metric(&self) -> &MetricPatch {
        &self.metric
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn eta(&self) -> Option<&OneForm> {
        self.eta.as_ref()
    }

    pub fn lambda(&self) -> &ScalarField {
        &self.lambda
    }

    pub fn mu(&self) -> &ScalarField {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn is_gradient(&self) -> bool {
        matches!(self.potential, Potential::Gradient(_))
    }

    pub fn constant_coefficients(&self) -> bool {
        self.constant_coefficients
    }

    pub fn at(&self, p: &[f64]) -> Result<SolitonPoint> {
        self.at_order(p, DEFAULT_JET_ORDER)
    }

    pub fn at_order(&self, p: &[f64], order: usize) -> Result<SolitonPoint> {
        let geo = PointGeometry::new(&self.metric, p, order)?;
        let (f, xi) = match &self.potential {
            Potential::Gradient(f) => {
                let fj = geo.scalar(f)?;
                let xi = geo.grad(&fj)?;
                (Some(fj), xi)
            }
            Potential::Field(x) => (None, geo.vector(x)?),
        };
        let eta = match (&self.eta, &f) {
            (Some(w), _) => Some(geo.one_form(w)?),
            (None, Some(fj)) => Some(geo.differential(fj)?),
            (None, None) => None,
        };
        let lambda = geo.scalar(&self.lambda)?;
        let mu = geo.scalar(&self.mu)?;
        SolitonPoint::from_parts(geo, f, xi, eta, lambda, mu)
    }

    /// Checks the instance invariants over a sample set: in the gradient
    /// case ξ = grad f and η = df to 1e−10, and constant coefficients have
    /// spread ≤ 1e−12.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<()> {
        let mut range: Option<(f64, f64, f64, f64)> = None;
        for p in points {
            let sp = self.at(p)?;
            if let Potential::Gradient(_) = self.potential {
                let geo = sp.geometry();
                let raised = geo.raise(sp.eta());
                let worst = raised
                    .iter()
                    .zip(sp.xi())
                    .map(|(a, b)| (a.value() - b.value()).abs())
                    .fold(0.0f64, f64::max);
                if self.eta.is_none() && worst > 1e-10 {
                    return Err(Error::Construction(format!(
                        "xi differs from grad f by {worst:e} at {p:?}"
                    )));
                }
            }
            let (l, m) = (sp.lambda().value(), sp.mu().value());
            range = Some(match range {
                None => (l, l, m, m),
                Some((l0, l1, m0, m1)) => (l0.min(l), l1.max(l), m0.min(m), m1.max(m)),
            });
        }
        if self.constant_coefficients {
            if let Some((l0, l1, m0, m1)) = range {
                if l1 - l0 > 1e-12 * (1.0 + l0.abs()) || m1 - m0 > 1e-12 * (1.0 + m0.abs()) {
                    return Err(Error::Construction(
                        "lambda or mu flagged constant but varies over the samples".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}
