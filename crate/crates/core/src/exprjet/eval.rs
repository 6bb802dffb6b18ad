use std::collections::HashMap;
use std::sync::Arc;

use super::expr::{BinOp, Expr, Func};
use super::jet::{Jet, JetSpace};
use crate::error::{Error, Result};

/// An expression whose coordinate references have been resolved against an
/// ordered list of coordinate names.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    expr: Expr,
    slots: HashMap<String, usize>,
    dim: usize,
}

impl PartialEq for BoundExpr {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr && self.slots == other.slots && self.dim == other.dim
    }
}

impl BoundExpr {
    pub fn bind(expr: &Expr, coords: &[String]) -> Result<Self> {
        let mut slots = HashMap::new();
        for name in expr.coordinates() {
            match coords.iter().position(|c| c == name) {
                Some(i) => {
                    slots.insert(name.to_string(), i);
                }
                None => {
                    return Err(Error::Unbound {
                        name: name.to_string(),
                        coords: coords.to_vec(),
                    })
                }
            }
        }
        Ok(BoundExpr {
            expr: expr.clone(),
            slots,
            dim: coords.len(),
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::Shape(format!(
                "point has {} coordinates, chart has {}",
                point.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Plain real evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point)?;
        self.eval_real(&self.expr, point)
    }

    fn eval_real(&self, e: &Expr, point: &[f64]) -> Result<f64> {
        let domain = |reason: String| Error::Domain {
            expr: e.to_string(),
            reason,
        };
        Ok(match e {
            Expr::Coord(name) => point[self.slots[name]],
            Expr::Lit(v) => *v,
            Expr::Const(c) => c.value(),
            Expr::Neg(a) => -self.eval_real(a, point)?,
            Expr::Binary(op, a, b) => {
                let x = self.eval_real(a, point)?;
                let y = self.eval_real(b, point)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain("division by zero".into()));
                        }
                        x / y
                    }
                    BinOp::Pow => match integer_exponent(b, y) {
                        Some(n) => {
                            if n < 0 && x == 0.0 {
                                return Err(domain("division by zero".into()));
                            }
                            powi_real(x, n)
                        }
                        None => {
                            if x <= 0.0 {
                                return Err(domain(format!(
                                    "non-integer power of non-positive base {x}"
                                )));
                            }
                            (y * x.ln()).exp()
                        }
                    },
                }
            }
            Expr::Call(f, a) => {
                let x = self.eval_real(a, point)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(domain(format!("logarithm of non-positive value {x}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(format!("square root of value {x}")));
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => {
                        if x.cos() == 0.0 {
                            return Err(domain("division by zero".into()));
                        }
                        x.tan()
                    }
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                }
            }
        })
    }

    /// Jet evaluation: Taylor coefficients up to `order` around `point`.
    pub fn eval_jet(&self, space: &Arc<JetSpace>, point: &[f64], order: usize) -> Result<Jet> {
        self.check_point(point)?;
        if space.nvars() != self.dim {
            return Err(Error::Shape(format!(
                "jet space has {} variables, chart has {}",
                space.nvars(),
                self.dim
            )));
        }
        if order > space.max_order() {
            return Err(Error::OrderExceeded {
                requested: order,
                available: space.max_order(),
            });
        }
        let vars: Vec<Jet> = (0..self.dim)
            .map(|i| Jet::variable(space, order, i, point[i]))
            .collect();
        self.eval_jet_node(&self.expr, space, &vars, order)
    }

    fn eval_jet_node(
        &self,
        e: &Expr,
        space: &Arc<JetSpace>,
        vars: &[Jet],
        order: usize,
    ) -> Result<Jet> {
        let here = || e.to_string();
        Ok(match e {
            Expr::Coord(name) => vars[self.slots[name]].clone(),
            Expr::Lit(v) => Jet::constant(space, order, *v),
            Expr::Const(c) => Jet::constant(space, order, c.value()),
            Expr::Neg(a) => self.eval_jet_node(a, space, vars, order)?.neg(),
            Expr::Binary(op, a, b) => {
                let x = self.eval_jet_node(a, space, vars, order)?;
                let y = self.eval_jet_node(b, space, vars, order)?;
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => x.div(&y).map_err(|err| err.in_expr(here))?,
                    BinOp::Pow => match integer_exponent(b, y.value()) {
                        Some(n) => x.powi(n).map_err(|err| err.in_expr(here))?,
                        None => {
                            if x.value() <= 0.0 {
                                return Err(Error::Domain {
                                    expr: here(),
                                    reason: format!(
                                        "non-integer power of non-positive base {}",
                                        x.value()
                                    ),
                                });
                            }
                            x.powf(&y).map_err(|err| err.in_expr(here))?
                        }
                    },
                }
            }
            Expr::Call(f, a) => {
                let x = self.eval_jet_node(a, space, vars, order)?;
                let r = match f {
                    Func::Exp => Ok(x.exp()),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Tan => x.tan(),
                    Func::Sinh => Ok(x.sinh()),
                    Func::Cosh => Ok(x.cosh()),
                    Func::Tanh => x.tanh(),
                };
                r.map_err(|err| err.in_expr(here))?
            }
        })
    }
}

/// Exponents that are coordinate-free and integral use repeated
/// multiplication, which admits any base.
fn integer_exponent(exponent: &Expr, value: f64) -> Option<i64> {
    if !exponent.coordinates().is_empty() {
        return None;
    }
    if value.fract() == 0.0 && value.abs() <= 1.0e9 {
        Some(value as i64)
    } else {
        None
    }
}

fn powi_real(x: f64, n: i64) -> f64 {
    if let Ok(k) = i32::try_from(n) {
        x.powi(k)
    } else {
        x.powf(n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprjet::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unbound_coordinate_is_error() {
        let e = parse("x + w").unwrap();
        let err = BoundExpr::bind(&e, &names(&["x", "y"])).unwrap_err();
        assert!(matches!(err, Error::Unbound { name, .. } if name == "w"));
    }

    #[test]
    fn right_associative_power_value() {
        let e = BoundExpr::bind(&parse("2^3^2").unwrap(), &[]).unwrap();
        assert_eq!(e.eval(&[]).unwrap(), 512.0);
        let left = BoundExpr::bind(&parse("(2^3)^2").unwrap(), &[]).unwrap();
        assert_eq!(left.eval(&[]).unwrap(), 64.0);
    }

    #[test]
    fn integer_power_of_negative_base() {
        let e = BoundExpr::bind(&parse("x^2").unwrap(), &names(&["x"])).unwrap();
        assert_eq!(e.eval(&[-2.0]).unwrap(), 4.0);
        let s = JetSpace::new(1, 2).unwrap();
        let j = e.eval_jet(&s, &[-2.0], 2).unwrap();
        assert_eq!(j.derivative(&[1]).unwrap(), -4.0);
        let frac = BoundExpr::bind(&parse("x^0.5").unwrap(), &names(&["x"])).unwrap();
        assert!(matches!(frac.eval(&[-2.0]), Err(Error::Domain { .. })));
        assert!(matches!(
            frac.eval_jet(&s, &[-2.0], 2),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn domain_error_names_subexpression() {
        let e = BoundExpr::bind(&parse("1 + ln(z)").unwrap(), &names(&["z"])).unwrap();
        let s = JetSpace::new(1, 2).unwrap();
        match e.eval_jet(&s, &[-1.0], 2) {
            Err(Error::Domain { expr, .. }) => assert_eq!(expr, "ln(z)"),
            other => panic!("unexpected {other:?}"),
        }
        match e.eval(&[-1.0]) {
            Err(Error::Domain { expr, .. }) => assert_eq!(expr, "ln(z)"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
