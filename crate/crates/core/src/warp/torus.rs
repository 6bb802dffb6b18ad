use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprjet::{parse, BoundExpr, Jet};
use crate::geometry::{cholesky, Chart, MetricPatch, PointGeometry, Residual, ScalarField};

/// A chart whose coordinates are periodic with the given periods.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicChart {
    chart: Chart,
    periods: Vec<f64>,
    resolution: Vec<usize>,
}

impl PeriodicChart {
    pub fn new(chart: Chart, periods: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let n = chart.dim();
        if periods.len() != n || resolution.len() != n {
            return Err(Error::Shape(format!(
                "periodic chart of dimension {n} needs {n} periods and resolutions"
            )));
        }
        if periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::Chart("periods must be positive".into()));
        }
        if resolution.contains(&0) {
            return Err(Error::Chart("resolution must be positive".into()));
        }
        Ok(PeriodicChart {
            chart,
            periods,
            resolution,
        })
    }

    /// Same periods with `res` nodes on every axis.
    pub fn with_resolution(&self, res: usize) -> Self {
        PeriodicChart {
            chart: self.chart.clone(),
            periods: self.periods.clone(),
            resolution: vec![res.max(1); self.periods.len()],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    fn cell_volume(&self) -> f64 {
        self.periods
            .iter()
            .zip(&self.resolution)
            .map(|(l, &r)| l / r as f64)
            .product()
    }

    fn nodes(&self) -> Vec<Vec<f64>> {
        let n = self.periods.len();
        let total: usize = self.resolution.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            out.push(
                (0..n)
                    .map(|a| self.periods[a] * idx[a] as f64 / self.resolution[a] as f64)
                    .collect(),
            );
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < self.resolution[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        out
    }

    /// Errors unless every expression agrees across each seam at a fixed set
    /// of sample points, to 1e−10 relative.
    pub fn check_periodic<'a>(&self, exprs: impl IntoIterator<Item = &'a BoundExpr>) -> Result<()> {
        let n = self.periods.len();
        let samples: Vec<Vec<f64>> = (1..=5)
            .map(|s| {
                (0..n)
                    .map(|a| {
                        let frac =
                            (s as f64 * 0.618_033_988_749_895 + a as f64 * 0.414_213_562).fract();
                        frac * self.periods[a]
                    })
                    .collect()
            })
            .collect();
        for e in exprs {
            for p in &samples {
                for a in 0..n {
                    let mut lo = p.clone();
                    lo[a] = 0.0;
                    let mut hi = p.clone();
                    hi[a] = self.periods[a];
                    let (u, v) = (e.eval(&lo)?, e.eval(&hi)?);
                    if (u - v).abs() > 1e-10 * (1.0 + u.abs().max(v.abs())) {
                        return Err(Error::Precondition(format!(
                            "`{}` is not periodic in `{}` with period {}",
                            e.expr(),
                            self.chart.coords()[a],
                            self.periods[a]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sum with pairwise splitting; order depends only on the length.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

fn volume_element(g: &MetricPatch, p: &[f64]) -> Result<f64> {
    let n = g.dim();
    let l =
        cholesky(&g.eval(p)?, n).ok_or_else(|| Error::NotPositiveDefinite { point: p.to_vec() })?;
    Ok((0..n).map(|i| l[i * n + i]).product())
}

fn metric_exprs(g: &MetricPatch) -> Vec<&BoundExpr> {
    let n = g.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push(g.component(i, j));
        }
    }
    out
}

/// ∫ field·√det g over one period cell by the periodic trapezoid rule.
pub fn torus_integral(pc: &PeriodicChart, g: &MetricPatch, field: &ScalarField) -> Result<f64> {
    pc.check_periodic(metric_exprs(g).into_iter().chain([field.bound()]))?;
    torus_integral_with(pc, g, |p| field.eval(p))
}

/// Same rule for an integrand given as a closure. Periodicity of the
/// closure is the caller's responsibility.
pub fn torus_integral_with<F>(pc: &PeriodicChart, g: &MetricPatch, integrand: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let values = pc
        .nodes()
        .iter()
        .map(|p| Ok(integrand(p)? * volume_element(g, p)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&values) * pc.cell_volume())
}

/// Base data on a torus: metric, potential f, constant μ and warping φ.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusInstance {
    pub chart: PeriodicChart,
    pub metric: MetricPatch,
    pub f: ScalarField,
    pub mu: f64,
    pub phi: ScalarField,
}

impl TorusInstance {
    fn check(&self) -> Result<()> {
        self.chart.check_periodic(
            metric_exprs(&self.metric)
                .into_iter()
                .chain([self.f.bound(), self.phi.bound()]),
        )
    }
}

/// Integrands gathered at one node, each already multiplied by √det g.
const SLOTS: usize = 14;
const LAP: usize = 0;
const LAP_ABS: usize = 1;
const DX2_XI: usize = 2;
const X2_LAP: usize = 3;
const TRACELESS2: usize = 4;
const HESS2: usize = 5;
const LAP2_N: usize = 6;
const LAP_XIPHI: usize = 7;
const X2: usize = 8;
const XIPHI2: usize = 9;
const ALONG: usize = 10;
const X4: usize = 11;
const HM2: usize = 12;
const HD: usize = 13;

fn node_values(
    g: &MetricPatch,
    f: &ScalarField,
    phi: &ScalarField,
    mu: f64,
    p: &[f64],
) -> Result<[f64; SLOTS]> {
    let geo = PointGeometry::new(g, p, 3)?;
    let n = geo.dim() as f64;
    let fj = geo.scalar(f)?;
    let xi = geo.grad(&fj)?;
    let hess = geo.hessian(&fj)?;
    let lap = geo.trace(&hess);
    let traceless: Vec<Jet> = hess
        .iter()
        .zip(geo.metric())
        .map(|(h, gg)| h.sub(&gg.mul(&lap).scale(1.0 / n)))
        .collect();
    let norm2 = geo.inner(&xi, &xi);
    let phij = geo.scalar(phi)?;
    let xi_phi = geo.directional(&xi, &phij)?.value();
    let grad_phi = geo.grad(&phij)?;
    let along = geo
        .inner(&geo.covariant_along(&xi, &grad_phi)?, &xi)
        .value();
    let df = geo.differential(&fj)?;
    let dd = geo.outer(&df, &df);
    let hm_tensor: Vec<Jet> = hess
        .iter()
        .zip(&dd)
        .map(|(h, d)| h.add(&d.scale(mu)))
        .collect();
    let l = lap.value();
    let x2 = norm2.value();
    let hm_scalar = l + mu * x2;
    let (pv, w) = (phij.value(), volume_element(g, p)?);
    let raw = [
        l,
        l.abs(),
        geo.directional(&xi, &norm2)?.value(),
        x2 * l,
        geo.inner2(&traceless, &traceless).value(),
        geo.inner2(&hess, &hess).value(),
        l * l / n,
        l * xi_phi / pv,
        x2,
        xi_phi * xi_phi / (pv * pv),
        along / pv,
        x2 * x2,
        geo.inner2(&hm_tensor, &hm_tensor).value() + hm_scalar * hm_scalar,
        geo.inner2(&hess, &dd).value(),
    ];
    Ok(raw.map(|v| v * w))
}

fn integrate_all(inst: &TorusInstance, pc: &PeriodicChart) -> Result<[f64; SLOTS]> {
    integrate_field(inst, &inst.f, pc)
}

fn integrate_field(
    inst: &TorusInstance,
    f: &ScalarField,
    pc: &PeriodicChart,
) -> Result<[f64; SLOTS]> {
    let rows = pc
        .nodes()
        .iter()
        .map(|p| node_values(&inst.metric, f, &inst.phi, inst.mu, p))
        .collect::<Result<Vec<_>>>()?;
    let vol = pc.cell_volume();
    let mut out = [0.0; SLOTS];
    let mut column = Vec::with_capacity(rows.len());
    for (k, slot) in out.iter_mut().enumerate() {
        column.clear();
        column.extend(rows.iter().map(|r| r[k]));
        *slot = pairwise_sum(&column) * vol;
    }
    Ok(out)
}

/// The five integrals of the aggregated identity and their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateTerms {
    pub resolution: usize,
    pub terms: [f64; 5],
    pub residual: Residual,
}

fn aggregate_terms(n: f64, mu: f64, s: &[f64; SLOTS], resolution: usize) -> AggregateTerms {
    let terms = [
        s[TRACELESS2],
        (n + 1.0) * s[LAP_XIPHI],
        ((2.0 - mu) * n + 2.0) / (2.0 * n) * s[X2],
        -n * s[XIPHI2],
        n * s[ALONG],
    ];
    AggregateTerms {
        resolution,
        terms,
        residual: crate::soliton::sum_terms(&terms),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactReport {
    pub resolution: Vec<usize>,
    /// ∫Δf.
    pub divergence_theorem: Residual,
    /// ∫d(|ξ|²)(ξ) + ∫|ξ|²Δf.
    pub integration_by_parts: Residual,
    /// Aggregated identity at the instance resolution.
    pub aggregate: AggregateTerms,
    /// The same identity at 16, 32, 64 and 128 nodes per axis.
    pub aggregate_trajectory: Vec<AggregateTerms>,
    /// ∫|Hess f − (Δf/n)g|² − ∫|Hess f|² + ∫(Δf)²/n.
    pub traceless_chain: Residual,
    /// ((n−1)/n)μ²∫|ξ|⁴.
    pub traceless_mu_term: f64,
    /// μ²∫|ξ|⁴.
    pub mu2_xi4: f64,
    /// ‖Hess f + μ df⊗df‖ / (‖Hess f‖ + |μ|‖df⊗df‖) for the instance's f.
    pub rigidity: f64,
    /// Smallest such ratio over random trial potentials.
    pub trial_min_rigidity: f64,
    pub trials: usize,
    /// μ minimising ∫|Hess f + μ df⊗df|² for the instance's f.
    pub mu_estimate: f64,
    /// ‖∇ξ‖ in L².
    pub nabla_xi_l2: f64,
}

fn rigidity(mu: f64, s: &[f64; SLOTS]) -> f64 {
    let denom = s[HESS2].sqrt() + mu.abs() * s[X4].sqrt();
    if denom > 0.0 {
        s[HM2].max(0.0).sqrt() / denom
    } else {
        0.0
    }
}

/// Random periodic trigonometric polynomial on the chart.
fn trial_potential(pc: &PeriodicChart, rng: &mut ChaCha8Rng) -> Result<ScalarField> {
    let coords = pc.chart().coords();
    let mut parts = Vec::new();
    for _ in 0..3 {
        let arg: Vec<String> = coords
            .iter()
            .zip(pc.periods())
            .map(|(c, l)| {
                let k: i32 = rng.gen_range(-2..=2);
                format!("{:?}*{c}", 2.0 * std::f64::consts::PI * k as f64 / l)
            })
            .collect();
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let arg = arg.join("+");
        parts.push(format!("({a:?})*sin({arg})+({b:?})*cos({arg})"));
    }
    ScalarField::new(pc.chart(), &parse(&parts.join("+"))?)
}

/// Quadrature checks of the integral identities on a torus base.
pub fn compact_integral_checks(
    inst: &TorusInstance,
    trials: usize,
    seed: u64,
) -> Result<CompactReport> {
    inst.check()?;
    let n = inst.metric.dim() as f64;
    let mu = inst.mu;
    let s = integrate_all(inst, &inst.chart)?;
    let res = inst.chart.resolution().iter().copied().max().unwrap_or(1);
    let trajectory = [16, 32, 64, 128]
        .iter()
        .map(|&r| {
            Ok(aggregate_terms(
                n,
                mu,
                &integrate_all(inst, &inst.chart.with_resolution(r))?,
                r,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = inst.chart.with_resolution(32);
    let mut best = f64::INFINITY;
    for _ in 0..trials {
        let f = trial_potential(&inst.chart, &mut rng)?;
        let st = integrate_field(inst, &f, &coarse)?;
        if st[HESS2] > 1e-12 {
            best = best.min(rigidity(mu, &st));
        }
    }

    let ibp = [s[DX2_XI], s[X2_LAP]];
    Ok(CompactReport {
        resolution: inst.chart.resolution().to_vec(),
        divergence_theorem: Residual::new(s[LAP], s[LAP_ABS]),
        integration_by_parts: Residual::new(ibp[0] + ibp[1], ibp[0].abs().max(ibp[1].abs())),
        aggregate: aggregate_terms(n, mu, &s, res),
        aggregate_trajectory: trajectory,
        traceless_chain: crate::soliton::sum_terms(&[s[TRACELESS2], -s[HESS2], s[LAP2_N]]),
        traceless_mu_term: (n - 1.0) / n * mu * mu * s[X4],
        mu2_xi4: mu * mu * s[X4],
        rigidity: rigidity(mu, &s),
        trial_min_rigidity: best,
        trials,
        mu_estimate: if s[X4] > 0.0 { -s[HD] / s[X4] } else { 0.0 },
        nabla_xi_l2: s[HESS2].max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn flat() -> (PeriodicChart, MetricPatch) {
        let g = MetricPatch::euclidean(2).unwrap();
        let pc = PeriodicChart::new(g.chart().clone(), vec![2.0 * PI; 2], vec![64, 64]).unwrap();
        (pc, g)
    }

    #[test]
    fn elementary_integrals() {
        let (pc, g) = flat();
        let one = ScalarField::parse(g.chart(), "1").unwrap();
        assert!((torus_integral(&pc, &g, &one).unwrap() - 4.0 * PI * PI).abs() < 1e-10);
        let s = ScalarField::parse(g.chart(), "sin(x)").unwrap();
        assert!(torus_integral(&pc, &g, &s).unwrap().abs() < 1e-10);
    }

    #[test]
    fn non_periodic_field_rejected() {
        let (pc, g) = flat();
        let s = ScalarField::parse(g.chart(), "x").unwrap();
        assert!(matches!(
            torus_integral(&pc, &g, &s),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn laplacian_integrates_to_zero() {
        let (pc, g) = flat();
        let f = ScalarField::parse(g.chart(), "sin(x)+cos(2*y)").unwrap();
        let v = torus_integral_with(&pc, &g, |p| crate::geometry::laplacian(&g, &f, p)).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn compact_checks_on_flat_torus() {
        let (pc, g) = flat();
        let inst = TorusInstance {
            f: ScalarField::parse(g.chart(), "sin(x)+sin(y)").unwrap(),
            phi: ScalarField::parse(g.chart(), "2+cos(y)").unwrap(),
            mu: 0.5,
            chart: pc,
            metric: g,
        };
        let rep = compact_integral_checks(&inst, 4, 7).unwrap();
        assert!(rep.divergence_theorem.value.abs() < 1e-10);
        assert!(rep.integration_by_parts.within(1e-10));
        assert!(rep.traceless_chain.within(1e-10));
        assert!(rep.trial_min_rigidity > 1e-3);
        assert_eq!(rep.aggregate_trajectory.len(), 4);
    }

    #[test]
    fn constant_potential_gives_zero_integrals() {
        let (pc, g) = flat();
        let inst = TorusInstance {
            f: ScalarField::parse(g.chart(), "3").unwrap(),
            phi: ScalarField::parse(g.chart(), "1").unwrap(),
            mu: 0.5,
            chart: pc,
            metric: g,
        };
        let rep = compact_integral_checks(&inst, 0, 0).unwrap();
        assert_eq!(rep.integration_by_parts.value, 0.0);
        assert_eq!(rep.aggregate.residual.value, 0.0);
        assert_eq!(rep.traceless_chain.value, 0.0);
    }
}
