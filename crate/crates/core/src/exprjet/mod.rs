//! Expression language and jet evaluation.
//!
//! Expressions are parsed once into an [`Expr`], bound to a chart's
//! coordinate names, and evaluated either as plain reals or as [`Jet`]s
//! carrying every mixed partial up to the requested order.

mod eval;
mod expr;
mod jet;
mod parse;

pub use eval::BoundExpr;
pub use expr::{BinOp, Constant, Expr, Func};
pub use jet::{Jet, JetSpace, MAX_JET_ORDER};
pub use parse::parse;

use crate::error::Result;
use crate::geometry::Chart;

/// Default truncation order for geometry pipelines.
pub const DEFAULT_JET_ORDER: usize = 4;

/// Evaluates `e` on `chart` at `point`, returning its jet of order `order`.
///
/// The point must satisfy the chart's domain constraints.
pub fn eval_jet(e: &Expr, chart: &Chart, point: &[f64], order: usize) -> Result<Jet> {
    chart.check_point(point)?;
    let bound = BoundExpr::bind(e, chart.coords())?;
    let space = JetSpace::new(chart.dim(), order)?;
    bound.eval_jet(&space, point, order)
}

/// Raw mixed partial `∂^α` carried by a jet.
pub fn derivative(j: &Jet, multi_index: &[u8]) -> Result<f64> {
    j.derivative(multi_index)
}
