use crate::error::{Error, Result};
use crate::exprjet::{parse, BoundExpr, Expr, Func};

/// A named coordinate system with positivity constraints on its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    name: String,
    coords: Vec<String>,
    constraints: Vec<BoundExpr>,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "pi"
        && Func::from_name(s).is_none()
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        constraints: Vec<Expr>,
    ) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Chart("dimension must be at least 1".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if !valid_identifier(c) {
                return Err(Error::Chart(format!(
                    "`{c}` is not a usable coordinate name"
                )));
            }
            if coords[..i].contains(c) {
                return Err(Error::Chart(format!("duplicate coordinate `{c}`")));
            }
        }
        let constraints = constraints
            .iter()
            .map(|e| BoundExpr::bind(e, &coords))
            .collect::<Result<_>>()?;
        Ok(Chart {
            name: name.into(),
            coords,
            constraints,
        })
    }

    /// Convenience constructor from string slices and constraint sources.
    pub fn parse(name: &str, coords: &[&str], constraints: &[&str]) -> Result<Self> {
        let cons = constraints
            .iter()
            .map(|s| parse(s))
            .collect::<Result<_>>()?;
        Chart::new(name, coords.iter().map(|s| s.to_string()).collect(), cons)
    }

    /// ℝⁿ with coordinates x1..xn (or x, y, z when n ≤ 3).
    pub fn euclidean(n: usize) -> Result<Self> {
        let coords: Vec<String> = if n <= 3 {
            ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=n).map(|i| format!("x{i}")).collect()
        };
        Chart::new(format!("R{n}"), coords, Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Expr> {
        self.constraints.iter().map(|b| b.expr())
    }

    /// Whether every constraint evaluates strictly positive at `p`.
    pub fn admits(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter().all(|x| x.is_finite())
            && self
                .constraints
                .iter()
                .all(|c| matches!(c.eval(p), Ok(v) if v > 0.0))
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, chart `{}` has {}",
                p.len(),
                self.name,
                self.dim()
            )));
        }
        for c in &self.constraints {
            if !matches!(c.eval(p), Ok(v) if v > 0.0) {
                return Err(Error::Constraint {
                    point: p.to_vec(),
                    constraint: c.expr().to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Scalar field: one expression bound to a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    expr: BoundExpr,
}

impl ScalarField {
    pub fn new(chart: &Chart, expr: &Expr) -> Result<Self> {
        Ok(ScalarField {
            expr: BoundExpr::bind(expr, chart.coords())?,
        })
    }

    pub fn parse(chart: &Chart, src: &str) -> Result<Self> {
        Self::new(chart, &parse(src)?)
    }

    pub fn constant(chart: &Chart, value: f64) -> Self {
        ScalarField {
            expr: BoundExpr::bind(&Expr::Lit(value), chart.coords()).expect("literal binds"),
        }
    }

    pub fn bound(&self) -> &BoundExpr {
        &self.expr
    }

    pub fn expr(&self) -> &Expr {
        self.expr.expr()
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.expr.eval(p)
    }
}

/// Contravariant components ξ^i, one expression each.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<BoundExpr>,
}

/// Covariant components η_i.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    components: Vec<BoundExpr>,
}

fn bind_components(chart: &Chart, exprs: &[Expr]) -> Result<Vec<BoundExpr>> {
    if exprs.len() != chart.dim() {
        return Err(Error::Shape(format!(
            "{} components given for a {}-dimensional chart",
            exprs.len(),
            chart.dim()
        )));
    }
    exprs
        .iter()
        .map(|e| BoundExpr::bind(e, chart.coords()))
        .collect()
}

impl VectorField {
    pub fn new(chart: &Chart, components: &[Expr]) -> Result<Self> {
        Ok(VectorField {
            components: bind_components(chart, components)?,
        })
    }

    pub fn parse(chart: &Chart, sources: &[&str]) -> Result<Self> {
        let exprs = sources
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(chart, &exprs)
    }

    pub fn components(&self) -> &[BoundExpr] {
        &self.components
    }
}

impl OneForm {
    pub fn new(chart: &Chart, components: &[Expr]) -> Result<Self> {
        Ok(OneForm {
            components: bind_components(chart, components)?,
        })
    }

    pub fn components(&self) -> &[BoundExpr] {
        &self.components
    }
}

/// Symmetric (0,2) tensor field given by its upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricField {
    dim: usize,
    upper: Vec<BoundExpr>,
}

impl SymmetricField {
    pub fn new(chart: &Chart, upper: &[Expr]) -> Result<Self> {
        let n = chart.dim();
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::Shape(format!(
                "symmetric field on a {n}-dimensional chart needs {} entries, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        Ok(SymmetricField {
            dim: n,
            upper: upper
                .iter()
                .map(|e| BoundExpr::bind(e, chart.coords()))
                .collect::<Result<_>>()?,
        })
    }

    pub fn component(&self, i: usize, j: usize) -> &BoundExpr {
        &self.upper[upper_index(self.dim, i, j)]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Metric given by the upper triangle of an expression matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPatch {
    chart: Chart,
    /// Row-major upper triangle: (0,0), (0,1), …, (0,n−1), (1,1), …
    upper: Vec<BoundExpr>,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl MetricPatch {
    pub fn new(chart: Chart, upper: &[Expr]) -> Result<Self> {
        let n = chart.dim();
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::Shape(format!(
                "metric on a {n}-dimensional chart needs {} upper-triangle entries, got {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        let upper = upper
            .iter()
            .map(|e| BoundExpr::bind(e, chart.coords()))
            .collect::<Result<_>>()?;
        Ok(MetricPatch { chart, upper })
    }

    /// Rows of the upper triangle: row `i` holds entries (i,i)..(i,n−1).
    pub fn from_rows(chart: Chart, rows: &[Vec<Expr>]) -> Result<Self> {
        let n = chart.dim();
        if rows.len() != n {
            return Err(Error::Shape(format!(
                "metric has {} rows, chart has dimension {n}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i {
                return Err(Error::Shape(format!(
                    "metric row {i} must have {} upper-triangle entries, got {}",
                    n - i,
                    row.len()
                )));
            }
        }
        let flat: Vec<Expr> = rows.iter().flatten().cloned().collect();
        Self::new(chart, &flat)
    }

    /// `factor · δ_ij`.
    pub fn conformal(chart: Chart, factor: &Expr) -> Result<Self> {
        let n = chart.dim();
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(if i == j {
                    factor.clone()
                } else {
                    Expr::Lit(0.0)
                });
            }
        }
        Self::new(chart, &upper)
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::conformal(Chart::euclidean(n)?, &Expr::Lit(1.0))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &BoundExpr {
        &self.upper[upper_index(self.dim(), i, j)]
    }

    /// Rows of the upper triangle, as expressions.
    pub fn rows(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (i..n)
                    .map(|j| self.component(i, j).expr().clone())
                    .collect()
            })
            .collect()
    }

    /// Plain evaluation of the full symmetric matrix (row-major).
    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.component(i, j).eval(p)?;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        Ok(m)
    }
}
