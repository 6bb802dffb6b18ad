//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients of a scalar quantity around a
//! base point, for every multi-index of total degree up to the jet's order.
//! Arithmetic and elementary functions propagate the coefficients exactly
//! (up to floating round-off), so mixed partials of any order up to the
//! truncation come out without step-size error.
//!
//! Monomials are stored in graded order: all degree-0 terms, then degree 1,
//! and so on. Truncating a jet to a lower order is therefore a prefix slice,
//! and jets of different orders over the same [`JetSpace`] can be combined
//! directly (the result takes the smaller order).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported jet order.
pub const MAX_JET_ORDER: usize = 8;

/// Monomial layout and product tables for jets in `nvars` variables.
pub struct JetSpace {
    nvars: usize,
    max_order: usize,
    monomials: Vec<Vec<u8>>,
    /// `len_upto[d]` is the number of monomials of degree ≤ d.
    len_upto: Vec<usize>,
    /// (lhs, rhs, out) index triples, sorted by degree of `out`.
    mul_table: Vec<(u32, u32, u32)>,
    /// `mul_end[d]` is the number of triples whose output degree is ≤ d.
    mul_end: Vec<usize>,
    /// Per variable: for each target monomial β (deg ≤ max_order − 1) the
    /// source index of β + e_v and the factor β_v + 1.
    deriv: Vec<Vec<(u32, f64)>>,
    index: HashMap<Vec<u8>, usize>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("max_order", &self.max_order)
            .field("monomials", &self.monomials.len())
            .finish()
    }
}

impl JetSpace {
    pub fn new(nvars: usize, max_order: usize) -> Result<Arc<Self>> {
        if max_order > MAX_JET_ORDER {
            return Err(Error::OrderExceeded {
                requested: max_order,
                available: MAX_JET_ORDER,
            });
        }
        let mut monomials: Vec<Vec<u8>> = Vec::new();
        let mut len_upto = Vec::with_capacity(max_order + 1);
        for degree in 0..=max_order {
            let mut current = vec![0u8; nvars];
            push_degree(&mut monomials, &mut current, 0, degree);
            len_upto.push(monomials.len());
        }
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let degree_of = |m: &[u8]| m.iter().map(|&d| d as usize).sum::<usize>();

        let mut mul_table = Vec::new();
        let mut sum = vec![0u8; nvars];
        for (a, ma) in monomials.iter().enumerate() {
            let da = degree_of(ma);
            for (b, mb) in monomials.iter().enumerate() {
                if da + degree_of(mb) > max_order {
                    continue;
                }
                for k in 0..nvars {
                    sum[k] = ma[k] + mb[k];
                }
                let out = index[&sum];
                mul_table.push((a as u32, b as u32, out as u32));
            }
        }
        mul_table.sort_by_key(|&(a, b, out)| (degree_of(&monomials[out as usize]), out, a, b));
        let mut mul_end = vec![0usize; max_order + 1];
        for d in 0..=max_order {
            mul_end[d] = mul_table
                .iter()
                .take_while(|&&(_, _, out)| degree_of(&monomials[out as usize]) <= d)
                .count();
        }

        let mut deriv = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let targets = if max_order == 0 {
                0
            } else {
                len_upto[max_order - 1]
            };
            let mut table = Vec::with_capacity(targets);
            for beta in &monomials[..targets] {
                let mut raised = beta.clone();
                raised[v] += 1;
                table.push((index[&raised] as u32, f64::from(beta[v]) + 1.0));
            }
            deriv.push(table);
        }

        Ok(Arc::new(JetSpace {
            nvars,
            max_order,
            monomials,
            len_upto,
            mul_table,
            mul_end,
            deriv,
            index,
        }))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.len_upto[order]
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut [u8], var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.to_vec());
        current[var] = 0;
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for take in (0..=remaining).rev() {
        current[var] = take as u8;
        push_degree(out, current, var + 1, remaining - take);
    }
    current[var] = 0;
}

/// Truncated Taylor expansion of a scalar at a point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, order: usize, value: f64) -> Self {
        let mut coeffs = vec![0.0; space.len(order)];
        coeffs[0] = value;
        Jet {
            space: Arc::clone(space),
            order,
            coeffs,
        }
    }

    pub fn zero(space: &Arc<JetSpace>, order: usize) -> Self {
        Self::constant(space, order, 0.0)
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(space: &Arc<JetSpace>, order: usize, var: usize, value: f64) -> Self {
        let mut jet = Self::constant(space, order, value);
        if order >= 1 {
            let mut alpha = vec![0u8; space.nvars];
            alpha[var] = 1;
            let i = space.index_of(&alpha).expect("degree-1 monomial");
            jet.coeffs[i] = 1.0;
        }
        jet
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, order: usize, coeffs: Vec<f64>) -> Result<Self> {
        if order > space.max_order {
            return Err(Error::OrderExceeded {
                requested: order,
                available: space.max_order,
            });
        }
        if coeffs.len() != space.len(order) {
            return Err(Error::Shape(format!(
                "jet of order {order} needs {} coefficients, got {}",
                space.len(order),
                coeffs.len()
            )));
        }
        Ok(Jet {
            space: Arc::clone(space),
            order,
            coeffs,
        })
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree-0 coefficient.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient at the multi-index `alpha`.
    pub fn coeff(&self, alpha: &[u8]) -> Result<f64> {
        let degree: usize = alpha.iter().map(|&d| d as usize).sum();
        if degree > self.order {
            return Err(Error::OrderExceeded {
                requested: degree,
                available: self.order,
            });
        }
        let i = self
            .space
            .index_of(alpha)
            .ok_or_else(|| Error::Shape(format!("multi-index {alpha:?} has wrong arity")))?;
        Ok(self.coeffs[i])
    }

    /// Raw mixed partial ∂^α at the base point (α! times the coefficient).
    pub fn derivative(&self, alpha: &[u8]) -> Result<f64> {
        let c = self.coeff(alpha)?;
        let factorial: f64 = alpha.iter().map(|&d| factorial(d as usize)).product();
        Ok(c * factorial)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            space: Arc::clone(&self.space),
            order,
            coeffs: self.coeffs[..self.space.len(order)].to_vec(),
        }
    }

    /// ∂/∂x_var as a jet one order lower.
    pub fn partial(&self, var: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::OrderExceeded {
                requested: 1,
                available: 0,
            });
        }
        let order = self.order - 1;
        let table = &self.space.deriv[var][..self.space.len(order)];
        let coeffs = table
            .iter()
            .map(|&(src, factor)| factor * self.coeffs[src as usize])
            .collect();
        Ok(Jet {
            space: Arc::clone(&self.space),
            order,
            coeffs,
        })
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let len = self.space.len(order);
        let coeffs = self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| a + b)
            .collect();
        Jet {
            space: Arc::clone(&self.space),
            order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let len = self.space.len(order);
        let coeffs = self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| a - b)
            .collect();
        Jet {
            space: Arc::clone(&self.space),
            order,
            coeffs,
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let mut coeffs = vec![0.0; self.space.len(order)];
        for &(a, b, out) in &self.space.mul_table[..self.space.mul_end[order]] {
            coeffs[out as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
        }
        Jet {
            space: Arc::clone(&self.space),
            order,
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            space: Arc::clone(&self.space),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    /// `self * a + b`-style accumulation: `self += a * b`.
    pub fn add_assign_product(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            self.coeffs.truncate(self.space.len(order));
            self.order = order;
        }
        for &(i, j, out) in &self.space.mul_table[..self.space.mul_end[order]] {
            self.coeffs[out as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
    }

    pub fn add_assign(&mut self, other: &Jet) {
        let order = self.order.min(other.order);
        if order < self.order {
            self.coeffs.truncate(self.space.len(order));
            self.order = order;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    /// Composition with a univariate function given its derivatives
    /// `derivs[k] = f^(k)(a0)` at the base value, k = 0..=order.
    fn compose(&self, derivs: &[f64]) -> Jet {
        let mut nilpotent = self.clone();
        nilpotent.coeffs[0] = 0.0;
        let mut out = Jet::constant(&self.space, self.order, derivs[0]);
        let mut power = Jet::constant(&self.space, self.order, 1.0);
        let mut fact = 1.0;
        for (k, d) in derivs.iter().enumerate().skip(1).take(self.order) {
            power = power.mul(&nilpotent);
            fact *= k as f64;
            let w = d / fact;
            if w != 0.0 {
                for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                    *o += w * p;
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Domain {
                expr: String::new(),
                reason: "division by zero".into(),
            });
        }
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut d = 1.0 / a;
        for k in 0..=self.order {
            derivs.push(d);
            d *= -((k + 1) as f64) / a;
        }
        Ok(self.compose(&derivs))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&vec![e; self.order + 1])
    }

    pub fn ln(&self) -> Result<Jet> {
        let a = self.value();
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::Domain {
                expr: String::new(),
                reason: format!("logarithm of non-positive value {a}"),
            });
        }
        let mut derivs = vec![a.ln()];
        let mut d = 1.0 / a;
        for k in 1..=self.order {
            derivs.push(d);
            d *= -(k as f64) / a;
        }
        Ok(self.compose(&derivs))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let a = self.value();
        if a < 0.0 || (a == 0.0 && self.order > 0) || !a.is_finite() {
            return Err(Error::Domain {
                expr: String::new(),
                reason: format!("square root of value {a}"),
            });
        }
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut exponent = 0.5;
        let mut d = a.sqrt();
        for _ in 0..=self.order {
            derivs.push(d);
            d *= exponent / a;
            exponent -= 1.0;
        }
        Ok(self.compose(&derivs))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let derivs: Vec<f64> = (0..=self.order).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let derivs: Vec<f64> = (0..=self.order).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn tan(&self) -> Result<Jet> {
        self.sin().div(&self.cos())
    }

    pub fn sinh(&self) -> Jet {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        let derivs: Vec<f64> = (0..=self.order)
            .map(|k| if k % 2 == 0 { s } else { c })
            .collect();
        self.compose(&derivs)
    }

    pub fn cosh(&self) -> Jet {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        let derivs: Vec<f64> = (0..=self.order)
            .map(|k| if k % 2 == 0 { c } else { s })
            .collect();
        self.compose(&derivs)
    }

    pub fn tanh(&self) -> Result<Jet> {
        self.sinh().div(&self.cosh())
    }

    /// Integer power by repeated multiplication; negative powers divide.
    pub fn powi(&self, n: i64) -> Result<Jet> {
        let mut result = Jet::constant(&self.space, self.order, 1.0);
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if n < 0 {
            result.recip()
        } else {
            Ok(result)
        }
    }

    /// `self^exponent` for a general exponent, lowered to exp(b·ln a).
    pub fn powf(&self, exponent: &Jet) -> Result<Jet> {
        Ok(self.ln()?.mul(exponent).exp())
    }

    /// True when every non-constant coefficient is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize, k: usize) -> Arc<JetSpace> {
        JetSpace::new(n, k).unwrap()
    }

    #[test]
    fn layout_is_graded() {
        let s = space(2, 3);
        assert_eq!(s.len(0), 1);
        assert_eq!(s.len(1), 3);
        assert_eq!(s.len(2), 6);
        assert_eq!(s.len(3), 10);
        for i in 0..s.len(3) {
            let d: usize = s.monomial(i).iter().map(|&x| x as usize).sum();
            assert!(i < s.len(d));
        }
    }

    #[test]
    fn product_of_variables() {
        let s = space(2, 2);
        let x = Jet::variable(&s, 2, 0, 2.0);
        let y = Jet::variable(&s, 2, 1, 3.0);
        let p = x.mul(&y);
        assert_eq!(p.value(), 6.0);
        assert_eq!(p.derivative(&[1, 0]).unwrap(), 3.0);
        assert_eq!(p.derivative(&[0, 1]).unwrap(), 2.0);
        assert_eq!(p.derivative(&[1, 1]).unwrap(), 1.0);
        assert_eq!(p.derivative(&[2, 0]).unwrap(), 0.0);
    }

    #[test]
    fn exp_derivatives_at_zero() {
        let s = space(1, 4);
        let x = Jet::variable(&s, 4, 0, 0.0);
        let e = x.exp();
        for k in 0..=4u8 {
            assert!((e.derivative(&[k]).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_lowers_order() {
        let s = space(2, 3);
        let x = Jet::variable(&s, 3, 0, 1.5);
        let cube = x.powi(3).unwrap();
        let d = cube.partial(0).unwrap();
        assert_eq!(d.order(), 2);
        assert!((d.value() - 3.0 * 1.5 * 1.5).abs() < 1e-14);
        assert!((d.derivative(&[1, 0]).unwrap() - 6.0 * 1.5).abs() < 1e-14);
        let c = Jet::constant(&s, 0, 1.0);
        assert!(matches!(c.partial(0), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn order_exceeded_on_deep_derivative() {
        let s = space(1, 2);
        let x = Jet::variable(&s, 2, 0, 1.0);
        assert!(matches!(
            x.derivative(&[3]),
            Err(Error::OrderExceeded {
                requested: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn ln_rejects_non_positive() {
        let s = space(1, 2);
        let x = Jet::variable(&s, 2, 0, -1.0);
        assert!(matches!(x.ln(), Err(Error::Domain { .. })));
        let z = Jet::variable(&s, 2, 0, 0.0);
        assert!(z.recip().is_err());
        assert!(z.sqrt().is_err());
    }

    #[test]
    fn mixed_orders_truncate_to_smaller() {
        let s = space(2, 4);
        let a = Jet::variable(&s, 4, 0, 1.0);
        let b = Jet::variable(&s, 2, 1, 1.0);
        assert_eq!(a.add(&b).order(), 2);
        assert_eq!(a.mul(&b).order(), 2);
    }

    #[test]
    fn recip_times_self_is_one() {
        let s = space(2, 4);
        let x = Jet::variable(&s, 4, 0, 0.7);
        let y = Jet::variable(&s, 4, 1, -0.3);
        let q = x.mul(&y).add_scalar(2.0).sin().add_scalar(1.5);
        let one = q.mul(&q.recip().unwrap());
        assert!((one.value() - 1.0).abs() < 1e-14);
        for c in &one.coeffs()[1..] {
            assert!(c.abs() < 1e-13);
        }
    }
}
