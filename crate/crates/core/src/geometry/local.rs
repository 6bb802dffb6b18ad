//! Jet-valued tensor calculus at a single point.
//!
//! [`PointGeometry`] expands the metric to order K around a point and
//! carries every derived quantity as a jet. Each derivative lowers the
//! available order by one: Christoffel symbols have order K−1, curvature
//! K−2. Differential operators accept jets of any order and return the
//! order they can support, failing with `OrderExceeded` when exhausted.

use std::sync::Arc;

use super::chart::{MetricPatch, OneForm, ScalarField, VectorField};
use crate::error::{Error, Result};
use crate::exprjet::{BoundExpr, Jet, JetSpace};

#[derive(Debug, Clone)]
pub struct PointGeometry {
    n: usize,
    order: usize,
    point: Vec<f64>,
    space: Arc<JetSpace>,
    g: Vec<Jet>,
    ginv: Vec<Jet>,
    /// Γ^k_ij at `[(k*n + i)*n + j]`.
    gamma: Vec<Jet>,
    /// R^l_ijk at `[((l*n + i)*n + j)*n + k]`, the l-component of R(∂_i,∂_j)∂_k.
    riemann: Vec<Jet>,
    ricci: Vec<Jet>,
    scal: Jet,
}

impl PointGeometry {
    /// Expands `metric` at `p` to jet order `order` (at least 2).
    pub fn new(metric: &MetricPatch, p: &[f64], order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::OrderExceeded {
                requested: 2,
                available: order,
            });
        }
        metric.chart().check_point(p)?;
        let n = metric.dim();
        let space = JetSpace::new(n, order)?;

        let mut g = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                g.push(metric.component(i, j).eval_jet(&space, p, order)?);
            }
        }
        let values: Vec<f64> = g.iter().map(Jet::value).collect();
        if !values.iter().all(|v| v.is_finite()) || cholesky(&values, n).is_none() {
            return Err(Error::NotPositiveDefinite { point: p.to_vec() });
        }
        let ginv = invert(&g, n, p)?;

        let zero = Jet::zero(&space, order);
        let mut dg = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for ij in 0..n * n {
                dg.push(g[ij].partial(l)?);
            }
        }
        let d = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];
        let mut first = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    first.push(d(i, j, l).add(d(j, i, l)).sub(d(l, i, j)).scale(0.5));
                }
            }
        }
        let mut gamma = vec![zero.clone(); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = Jet::zero(&space, order);
                    for l in 0..n {
                        acc.add_assign_product(&ginv[k * n + l], &first[(l * n + i) * n + j]);
                    }
                    gamma[(k * n + j) * n + i] = acc.clone();
                    gamma[(k * n + i) * n + j] = acc;
                }
            }
        }

        let mut dgamma = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for lkj in 0..n * n * n {
                dgamma.push(gamma[lkj].partial(i)?);
            }
        }
        let gm = |l: usize, i: usize, j: usize| &gamma[(l * n + i) * n + j];
        let dgm = |m: usize, l: usize, i: usize, j: usize| &dgamma[((m * n + l) * n + i) * n + j];
        let mut riemann = vec![Jet::zero(&space, order - 2); n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    for k in 0..n {
                        let mut acc = dgm(i, l, j, k).sub(dgm(j, l, i, k));
                        for m in 0..n {
                            acc.add_assign_product(gm(l, i, m), gm(m, j, k));
                            acc.add_assign_product(&gm(l, j, m).neg(), gm(m, i, k));
                        }
                        riemann[((l * n + j) * n + i) * n + k] = acc.neg();
                        riemann[((l * n + i) * n + j) * n + k] = acc;
                    }
                }
            }
        }
        let mut ricci = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let mut acc = Jet::zero(&space, order - 2);
                for i in 0..n {
                    acc.add_assign(&riemann[((i * n + i) * n + j) * n + k]);
                }
                ricci.push(acc);
            }
        }
        let mut scal = Jet::zero(&space, order - 2);
        for j in 0..n {
            for k in 0..n {
                scal.add_assign_product(&ginv[j * n + k], &ricci[j * n + k]);
            }
        }

        Ok(PointGeometry {
            n,
            order,
            point: p.to_vec(),
            space,
            g,
            ginv,
            gamma,
            riemann,
            ricci,
            scal,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn constant(&self, v: f64) -> Jet {
        Jet::constant(&self.space, self.order, v)
    }

    pub fn zero(&self) -> Jet {
        Jet::zero(&self.space, self.order)
    }

    pub fn metric(&self) -> &[Jet] {
        &self.g
    }

    pub fn inverse_metric(&self) -> &[Jet] {
        &self.ginv
    }

    pub fn christoffel(&self) -> &[Jet] {
        &self.gamma
    }

    /// R^l_ijk; see the field documentation for layout.
    pub fn riemann(&self) -> &[Jet] {
        &self.riemann
    }

    /// R_ijkl = g(R(∂_i,∂_j)∂_l, ∂_k), so that R_ijij is the sectional
    /// curvature times the area form squared.
    pub fn riemann_lowered(&self) -> Vec<Jet> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = Jet::zero(&self.space, self.order);
                        for m in 0..n {
                            acc.add_assign_product(
                                &self.g[k * n + m],
                                &self.riemann[((m * n + i) * n + j) * n + l],
                            );
                        }
                        out.push(acc);
                    }
                }
            }
        }
        out
    }

    pub fn ricci(&self) -> &[Jet] {
        &self.ricci
    }

    pub fn scal(&self) -> &Jet {
        &self.scal
    }

    /// Q = g⁻¹S as a (1,1) tensor, `[i*n + j]` = Q^i_j.
    pub fn ricci_operator(&self) -> Vec<Jet> {
        self.raise_first(&self.ricci)
    }

    /// Jet of a bound expression at this point.
    pub fn eval(&self, e: &BoundExpr) -> Result<Jet> {
        e.eval_jet(&self.space, &self.point, self.order)
    }

    pub fn scalar(&self, f: &ScalarField) -> Result<Jet> {
        self.eval(f.bound())
    }

    pub fn vector(&self, x: &VectorField) -> Result<Vec<Jet>> {
        x.components().iter().map(|c| self.eval(c)).collect()
    }

    pub fn one_form(&self, w: &OneForm) -> Result<Vec<Jet>> {
        w.components().iter().map(|c| self.eval(c)).collect()
    }

    fn sum<F: Fn(usize) -> (Jet, Jet)>(&self, count: usize, term: F) -> Jet {
        let mut acc = self.zero();
        for a in 0..count {
            let (x, y) = term(a);
            acc.add_assign_product(&x, &y);
        }
        acc
    }

    /// Components ∂_i f.
    pub fn differential(&self, f: &Jet) -> Result<Vec<Jet>> {
        (0..self.n).map(|i| f.partial(i)).collect()
    }

    pub fn raise(&self, w: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = self.zero();
                for j in 0..n {
                    acc.add_assign_product(&self.ginv[i * n + j], &w[j]);
                }
                acc
            })
            .collect()
    }

    pub fn lower(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = self.zero();
                for j in 0..n {
                    acc.add_assign_product(&self.g[i * n + j], &x[j]);
                }
                acc
            })
            .collect()
    }

    /// g^{ik} T_kj for a (0,2) tensor, giving T^i_j.
    pub fn raise_first(&self, t: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.zero();
                for k in 0..n {
                    acc.add_assign_product(&self.ginv[i * n + k], &t[k * n + j]);
                }
                out.push(acc);
            }
        }
        out
    }

    /// T^i_j X^j for a (1,1) tensor.
    pub fn apply(&self, t: &[Jet], x: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = self.zero();
                for j in 0..n {
                    acc.add_assign_product(&t[i * n + j], &x[j]);
                }
                acc
            })
            .collect()
    }

    pub fn grad(&self, f: &Jet) -> Result<Vec<Jet>> {
        Ok(self.raise(&self.differential(f)?))
    }

    /// Hess_ij = ∂_i∂_j f − Γ^k_ij ∂_k f.
    pub fn hessian(&self, f: &Jet) -> Result<Vec<Jet>> {
        let n = self.n;
        let df = self.differential(f)?;
        let mut out = vec![self.zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut h = df[i].partial(j)?;
                for k in 0..n {
                    h.add_assign_product(&self.gamma[(k * n + i) * n + j].neg(), &df[k]);
                }
                out[j * n + i] = h.clone();
                out[i * n + j] = h;
            }
        }
        Ok(out)
    }

    /// g-trace of a (0,2) tensor.
    pub fn trace(&self, t: &[Jet]) -> Jet {
        self.sum(self.n * self.n, |a| (self.ginv[a].clone(), t[a].clone()))
    }

    /// Δf = g^{ij} Hess_ij (positive on convex functions).
    pub fn laplacian(&self, f: &Jet) -> Result<Jet> {
        Ok(self.trace(&self.hessian(f)?))
    }

    /// X(h) = X^i ∂_i h.
    pub fn directional(&self, x: &[Jet], h: &Jet) -> Result<Jet> {
        let dh = self.differential(h)?;
        Ok(self.sum(self.n, |i| (x[i].clone(), dh[i].clone())))
    }

    /// g(X, Y).
    pub fn inner(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let n = self.n;
        self.sum(n * n, |a| (self.g[a].clone(), x[a / n].mul(&y[a % n])))
    }

    /// ⟨w, v⟩ for covectors via g⁻¹.
    pub fn inner_covectors(&self, w: &[Jet], v: &[Jet]) -> Jet {
        let n = self.n;
        self.sum(n * n, |a| (self.ginv[a].clone(), w[a / n].mul(&v[a % n])))
    }

    /// ⟨A, B⟩ = g^{ik} g^{jl} A_ij B_kl for (0,2) tensors.
    pub fn inner2(&self, a: &[Jet], b: &[Jet]) -> Jet {
        let n = self.n;
        let ra = self.raise_first(a);
        let mut acc = self.zero();
        for k in 0..n {
            for l in 0..n {
                // A^{kl} = A^k_j g^{jl}
                let mut up = self.zero();
                for j in 0..n {
                    up.add_assign_product(&ra[k * n + j], &self.ginv[j * n + l]);
                }
                acc.add_assign_product(&up, &b[k * n + l]);
            }
        }
        acc
    }

    /// Full contraction |T|² = g_ik g^{jl} T^i_j T^k_l for a (1,1) tensor.
    pub fn norm2_mixed(&self, t: &[Jet]) -> Jet {
        let n = self.n;
        let lowered = self.lower_first(t);
        // T_kj = g_ki T^i_j ; |T|² = T_kj T^k_l g^{jl}.
        let mut acc = self.zero();
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    acc.add_assign_product(
                        &lowered[k * n + j],
                        &t[k * n + l].mul(&self.ginv[j * n + l]),
                    );
                }
            }
        }
        acc
    }

    fn lower_first(&self, t: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                let mut acc = self.zero();
                for i in 0..n {
                    acc.add_assign_product(&self.g[k * n + i], &t[i * n + j]);
                }
                out.push(acc);
            }
        }
        out
    }

    /// (∇X)^i_j = ∂_j X^i + Γ^i_jk X^k, stored at `[i*n + j]`.
    pub fn nabla_vector(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = x[i].partial(j)?;
                for k in 0..n {
                    acc.add_assign_product(&self.gamma[(i * n + j) * n + k], &x[k]);
                }
                out.push(acc);
            }
        }
        Ok(out)
    }

    /// ∇_X Y = (∇Y)(X).
    pub fn covariant_along(&self, x: &[Jet], y: &[Jet]) -> Result<Vec<Jet>> {
        Ok(self.apply(&self.nabla_vector(y)?, x))
    }

    /// (L_X g)_ij = g_jk (∇X)^k_i + g_ik (∇X)^k_j.
    pub fn lie_derivative_metric(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.n;
        let nx = self.nabla_vector(x)?;
        let lowered = self.lower_first(&nx); // (∇X)_kj = g_ki (∇X)^i_j
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(lowered[j * n + i].add(&lowered[i * n + j]));
            }
        }
        Ok(out)
    }

    /// div X = ∂_i X^i + Γ^i_ik X^k.
    pub fn div_vector(&self, x: &[Jet]) -> Result<Jet> {
        let nx = self.nabla_vector(x)?;
        let n = self.n;
        let mut acc = self.zero();
        for i in 0..n {
            acc.add_assign(&nx[i * n + i]);
        }
        Ok(acc)
    }

    /// div w = g^ij (∂_i w_j − Γ^k_ij w_k).
    pub fn div_covector(&self, w: &[Jet]) -> Result<Jet> {
        let n = self.n;
        let mut acc = self.zero();
        for i in 0..n {
            for j in 0..n {
                let mut nab = w[j].partial(i)?;
                for k in 0..n {
                    nab.add_assign_product(&self.gamma[(k * n + i) * n + j].neg(), &w[k]);
                }
                acc.add_assign_product(&self.ginv[i * n + j], &nab);
            }
        }
        Ok(acc)
    }

    /// (∇_i T)_kj = ∂_i T_kj − Γ^l_ik T_lj − Γ^l_ij T_kl, at `[(i*n + k)*n + j]`.
    pub fn nabla_covariant2(&self, t: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let mut acc = t[k * n + j].partial(i)?;
                    for l in 0..n {
                        acc.add_assign_product(
                            &self.gamma[(l * n + i) * n + k].neg(),
                            &t[l * n + j],
                        );
                        acc.add_assign_product(
                            &self.gamma[(l * n + i) * n + j].neg(),
                            &t[k * n + l],
                        );
                    }
                    out.push(acc);
                }
            }
        }
        Ok(out)
    }

    /// div(T)_j = g^ik (∇_i T)_kj.
    pub fn div_covariant2(&self, t: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.n;
        let nt = self.nabla_covariant2(t)?;
        Ok((0..n)
            .map(|j| {
                let mut acc = self.zero();
                for i in 0..n {
                    for k in 0..n {
                        acc.add_assign_product(&self.ginv[i * n + k], &nt[(i * n + k) * n + j]);
                    }
                }
                acc
            })
            .collect())
    }

    /// ∇_k g_ij, at `[(k*n + i)*n + j]`; vanishes for the Levi-Civita connection.
    pub fn nabla_metric(&self) -> Result<Vec<Jet>> {
        self.nabla_covariant2(&self.g)
    }

    /// T(X, ·) for a (0,2) tensor.
    pub fn contract_first(&self, t: &[Jet], x: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        (0..n)
            .map(|j| self.sum(n, |i| (x[i].clone(), t[i * n + j].clone())))
            .collect()
    }

    /// T(X, Y) for a (0,2) tensor.
    pub fn bilinear(&self, t: &[Jet], x: &[Jet], y: &[Jet]) -> Jet {
        let tx = self.contract_first(t, x);
        self.sum(self.n, |j| (tx[j].clone(), y[j].clone()))
    }

    /// a ⊗ b for covectors, `[i*n + j]` = a_i b_j.
    pub fn outer(&self, a: &[Jet], b: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(a[i].mul(&b[j]));
            }
        }
        out
    }
}

/// Lower-triangular Cholesky factor of a row-major matrix, or `None`
/// when the matrix is not positive definite.
pub(crate) fn cholesky(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Gauss-Jordan inverse of a jet matrix with pivoting on base values.
fn invert(a: &[Jet], n: usize, p: &[f64]) -> Result<Vec<Jet>> {
    let space = Arc::clone(a[0].space());
    let order = a.iter().map(Jet::order).min().unwrap_or(0);
    let mut m: Vec<Jet> = a.to_vec();
    let mut inv: Vec<Jet> = (0..n * n)
        .map(|k| Jet::constant(&space, order, if k / n == k % n { 1.0 } else { 0.0 }))
        .collect();
    let scale = a.iter().fold(0.0f64, |s, j| s.max(j.value().abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                m[r * n + col]
                    .value()
                    .abs()
                    .total_cmp(&m[s * n + col].value().abs())
            })
            .expect("non-empty range");
        if m[pivot * n + col].value().abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Singular { point: p.to_vec() });
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let r = m[col * n + col]
            .recip()
            .map_err(|_| Error::Singular { point: p.to_vec() })?;
        for k in 0..n {
            m[col * n + k] = m[col * n + k].mul(&r);
            inv[col * n + k] = inv[col * n + k].mul(&r);
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row * n + col].clone();
            if factor.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for k in 0..n {
                let dm = factor.mul(&m[col * n + k]);
                m[row * n + k] = m[row * n + k].sub(&dm);
                let di = factor.mul(&inv[col * n + k]);
                inv[row * n + k] = inv[row * n + k].sub(&di);
            }
        }
    }
    Ok(inv)
}
