use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exprjet::{parse, Expr};
use crate::geometry::{cholesky, Chart, MetricPatch, ScalarField, VectorField};
use crate::warp::{build_warped, PeriodicChart, WarpedProduct};

use super::builtin;

/// Name of the sampling generator, recorded in every report.
pub const SAMPLER: &str = "ChaCha8Rng/rand_chacha-0.3/uniform-box-rejection";

pub const DEFAULT_COUNT: usize = 32;
pub const DEFAULT_RESOLUTION: usize = 64;
pub const DEFAULT_TRIALS: usize = 8;

/// A scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Required unless `warped` is given, in which case the product chart is
    /// assembled from the factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSpec>,
    /// Square symmetric matrix of expressions, or its upper triangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fields: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub vector_fields: BTreeMap<String, Vec<String>>,
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warped: Option<WarpedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub coords: Vec<String>,
    /// Expressions that must be strictly positive on the domain.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
}

fn default_count() -> usize {
    DEFAULT_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckSpec {
    Id(String),
    Detailed(CheckEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl CheckSpec {
    pub fn id(&self) -> &str {
        match self {
            CheckSpec::Id(id) => id,
            CheckSpec::Detailed(e) => &e.id,
        }
    }

    pub fn tol(&self) -> Option<f64> {
        match self {
            CheckSpec::Id(_) => None,
            CheckSpec::Detailed(e) => e.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedSpec {
    pub base: PatchRef,
    pub fiber: PatchRef,
    /// Warping function: the name of a field or an expression in the base
    /// coordinates.
    pub phi: String,
}

/// `"builtin:<name>"`, a path relative to the scenario file, or an inline
/// chart and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatchRef {
    Named(String),
    Inline(PatchSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub name: String,
    pub chart: ChartSpec,
    pub metric: Vec<Vec<String>>,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicSpec {
    pub periods: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn byte_offset(src: &str, line: usize, column: usize) -> usize {
    let start: usize = src
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(src.len())
}

/// Parses scenario JSON. Syntax errors carry a byte offset, schema errors the
/// path of the offending field.
pub fn parse_scenario(src: &str, origin: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(src);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            let at = byte_offset(src, inner.line(), inner.column());
            Error::scenario(origin, format!("malformed JSON at byte {at}: {inner}"))
        } else {
            Error::scenario(format!("{origin}: {path}"), inner.to_string())
        }
    })
}

/// Reads `builtin:<name>` or a file. Returns the scenario and the directory
/// relative references resolve against.
pub fn load(source: &str) -> Result<(Scenario, Option<PathBuf>)> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return Ok((builtin::builtin(name)?, None));
    }
    let path = Path::new(source);
    let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{source}: {e}")))?;
    let sc = parse_scenario(&src, source)?;
    Ok((sc, path.parent().map(Path::to_path_buf)))
}

fn expr_at(path: &str, src: &str) -> Result<Expr> {
    parse(src).map_err(|e| Error::scenario(path, e.to_string()))
}

fn at<T>(path: impl Into<String>, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Scenario { .. } => e,
        other => Error::scenario(path, other.to_string()),
    })
}

fn build_chart(name: &str, spec: &ChartSpec, path: &str) -> Result<Chart> {
    if let Some(d) = spec.dimension {
        if d != spec.coords.len() {
            return Err(Error::scenario(
                format!("{path}.dimension"),
                format!("dimension {d} but {} coordinates", spec.coords.len()),
            ));
        }
    }
    let cons = spec
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| expr_at(&format!("{path}.constraints[{i}]"), c))
        .collect::<Result<Vec<_>>>()?;
    at(path, Chart::new(name, spec.coords.clone(), cons))
}

fn build_metric(chart: Chart, rows: &[Vec<String>], path: &str) -> Result<MetricPatch> {
    let n = chart.dim();
    let square = rows.len() == n && rows.iter().all(|r| r.len() == n);
    let triangle = rows.len() == n && rows.iter().enumerate().all(|(i, r)| r.len() == n - i);
    if !square && !triangle {
        return Err(Error::scenario(
            path,
            format!("metric must be a {n}x{n} matrix or its upper triangle"),
        ));
    }
    let mut parsed = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let r = row
            .iter()
            .enumerate()
            .map(|(j, s)| expr_at(&format!("{path}[{i}][{j}]"), s))
            .collect::<Result<Vec<_>>>()?;
        parsed.push(r);
    }
    if triangle && !square {
        return at(path, MetricPatch::from_rows(chart, &parsed));
    }
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..n {
            if j < i && parsed[i][j] != parsed[j][i] {
                return Err(Error::scenario(
                    format!("{path}[{i}][{j}]"),
                    format!(
                        "metric is not symmetric: `{}` vs `{}`",
                        rows[i][j], rows[j][i]
                    ),
                ));
            }
            if j >= i {
                upper.push(parsed[i][j].clone());
            }
        }
    }
    at(path, MetricPatch::new(chart, &upper))
}

fn resolve_patch(r: &PatchRef, dir: Option<&Path>, path: &str) -> Result<MetricPatch> {
    let (name, chart, metric) = match r {
        PatchRef::Inline(p) => (p.name.clone(), p.chart.clone(), p.metric.clone()),
        PatchRef::Named(src) => {
            let sc = if let Some(b) = src.strip_prefix("builtin:") {
                builtin::builtin(b)?
            } else {
                let full = dir.map_or_else(|| PathBuf::from(src), |d| d.join(src));
                load(&full.to_string_lossy())?.0
            };
            match (sc.chart, sc.metric) {
                (Some(c), Some(m)) => (sc.name, c, m),
                _ => {
                    return Err(Error::scenario(
                        path,
                        format!("`{src}` does not define a chart and metric"),
                    ))
                }
            }
        }
    };
    let chart = build_chart(&name, &chart, &format!("{path}.chart"))?;
    build_metric(chart, &metric, &format!("{path}.metric"))
}

/// A validated scenario: bound expressions and the sample plan.
#[derive(Debug, Clone)]
pub struct Model {
    pub scenario: Scenario,
    /// Metric the sample points live on (the product for warped scenarios).
    pub metric: MetricPatch,
    pub warped: Option<WarpedProduct>,
    pub periodic: Option<PeriodicChart>,
    /// Scalar fields, bound to the base chart when warped.
    pub fields: BTreeMap<String, ScalarField>,
    pub vector_fields: BTreeMap<String, VectorField>,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Overrides applied on top of the scenario's own sampling block.
#[derive(Debug, Clone, Copy, Default)]
pub struct SampleOverrides {
    pub count: Option<usize>,
    pub seed: Option<u64>,
}

impl Model {
    pub fn build(scenario: Scenario, dir: Option<&Path>, ov: SampleOverrides) -> Result<Self> {
        let (metric, warped, field_chart) =
            match (&scenario.warped, &scenario.chart, &scenario.metric) {
                (Some(w), None, None) => {
                    let base = resolve_patch(&w.base, dir, "warped.base")?;
                    let fiber = resolve_patch(&w.fiber, dir, "warped.fiber")?;
                    let phi = match scenario.fields.get(&w.phi) {
                        Some(src) => expr_at(&format!("fields.{}", w.phi), src)?,
                        None => expr_at("warped.phi", &w.phi)?,
                    };
                    let wp = at("warped", build_warped(&base, &fiber, &phi, &[]))?;
                    let chart = base.chart().clone();
                    (wp.product().clone(), Some(wp), chart)
                }
                (None, Some(c), Some(m)) => {
                    let chart = build_chart(&scenario.name, c, "chart")?;
                    let metric = build_metric(chart.clone(), m, "metric")?;
                    (metric, None, chart)
                }
                (Some(_), _, _) => {
                    return Err(Error::scenario(
                        "warped",
                        "a warped scenario takes its chart and metric from the factors",
                    ))
                }
                _ => return Err(Error::scenario("chart", "chart and metric are required")),
            };

        let mut fields = BTreeMap::new();
        for (name, src) in &scenario.fields {
            let path = format!("fields.{name}");
            let e = expr_at(&path, src)?;
            fields.insert(name.clone(), at(path, ScalarField::new(&field_chart, &e))?);
        }
        let mut vector_fields = BTreeMap::new();
        for (name, comps) in &scenario.vector_fields {
            let path = format!("vector_fields.{name}");
            if comps.len() != metric.dim() {
                return Err(Error::scenario(
                    path,
                    format!("{} components for dimension {}", comps.len(), metric.dim()),
                ));
            }
            let exprs = comps
                .iter()
                .enumerate()
                .map(|(i, s)| expr_at(&format!("{path}[{i}]"), s))
                .collect::<Result<Vec<_>>>()?;
            vector_fields.insert(
                name.clone(),
                at(path, VectorField::new(metric.chart(), &exprs))?,
            );
        }

        let periodic = match &scenario.periodic {
            None => None,
            Some(p) => {
                let n = metric.dim();
                Some(at(
                    "periodic",
                    PeriodicChart::new(
                        metric.chart().clone(),
                        p.periods.clone(),
                        vec![p.resolution; n],
                    ),
                )?)
            }
        };

        let seed = ov.seed.unwrap_or(scenario.sampling.seed);
        let count = ov.count.unwrap_or(scenario.sampling.count);
        let points = sample(&metric, &scenario.sampling.bounds, count, seed)?;
        if let Some(wp) = &warped {
            let base: Vec<Vec<f64>> = points.iter().map(|p| wp.split(p).0.to_vec()).collect();
            at(
                "warped.phi",
                build_warped(wp.base(), wp.fiber(), wp.warping().expr(), &base),
            )?;
        }
        Ok(Model {
            scenario,
            metric,
            warped,
            periodic,
            fields,
            vector_fields,
            points,
            seed,
        })
    }

    pub fn field(&self, name: &str) -> Option<&ScalarField> {
        self.fields.get(name)
    }

    /// A field on the sampling chart, lifted from the base if warped.
    pub fn field_on_samples(&self, name: &str) -> Result<Option<ScalarField>> {
        match (self.fields.get(name), &self.warped) {
            (None, _) => Ok(None),
            (Some(f), None) => Ok(Some(f.clone())),
            (Some(f), Some(wp)) => wp.lift(f).map(Some),
        }
    }
}

/// Uniform samples in `bounds` that satisfy the chart constraints, with a
/// budget of ten draws per requested point. The metric must be positive
/// definite at every accepted sample.
pub fn sample(
    g: &MetricPatch,
    bounds: &[[f64; 2]],
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = g.dim();
    if bounds.len() != n {
        return Err(Error::scenario(
            "sampling.box",
            format!("{} intervals for dimension {n}", bounds.len()),
        ));
    }
    for (i, [lo, hi]) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::scenario(
                format!("sampling.box[{i}]"),
                format!("invalid interval [{lo}, {hi}]"),
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let budget = count.saturating_mul(10);
    let mut draws = 0;
    while out.len() < count {
        if draws == budget {
            return Err(Error::scenario(
                "sampling",
                format!(
                    "only {} of {count} points satisfy the domain constraints after {budget} draws",
                    out.len()
                ),
            ));
        }
        draws += 1;
        let p: Vec<f64> = bounds
            .iter()
            .map(|&[lo, hi]| if lo < hi { rng.gen_range(lo..hi) } else { lo })
            .collect();
        if !g.chart().admits(&p) {
            continue;
        }
        let m = g.eval(&p)?;
        if !m.iter().all(|v| v.is_finite()) || cholesky(&m, n).is_none() {
            return Err(Error::NotPositiveDefinite { point: p });
        }
        out.push(p);
    }
    Ok(out)
}
