//! Classical tensor identities evaluated as residuals. Each returns the
//! largest componentwise defect together with the magnitude of the
//! quantities being compared.

use super::local::PointGeometry;
use super::{max_diff_values, Residual};
use crate::error::Result;
use crate::exprjet::Jet;

/// Antisymmetries, pair symmetry and first Bianchi identity of R_ijkl.
pub fn riemann_symmetries(geo: &PointGeometry) -> Residual {
    let n = geo.dim();
    let r = geo.riemann_lowered();
    let at = |i: usize, j: usize, k: usize, l: usize| r[((i * n + j) * n + k) * n + l].value();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = at(i, j, k, l);
                    scale = scale.max(v.abs());
                    worst = worst
                        .max((v + at(j, i, k, l)).abs())
                        .max((v + at(i, j, l, k)).abs())
                        .max((v - at(k, l, i, j)).abs())
                        .max((v + at(i, k, l, j) + at(i, l, j, k)).abs());
                }
            }
        }
    }
    Residual::new(worst, scale)
}

/// ∇g = 0.
pub fn metric_compatibility(geo: &PointGeometry) -> Result<Residual> {
    let nabla = geo.nabla_metric()?;
    let value = nabla.iter().fold(0.0f64, |m, j| m.max(j.value().abs()));
    let scale = geo
        .metric()
        .iter()
        .fold(0.0f64, |m, j| m.max(j.value().abs()));
    Ok(Residual::new(value, scale))
}

/// div S = ½ d(scal).
pub fn contracted_bianchi(geo: &PointGeometry) -> Result<Residual> {
    let div = geo.div_covariant2(geo.ricci())?;
    let half_dscal: Vec<Jet> = geo
        .differential(geo.scal())?
        .iter()
        .map(|j| j.scale(0.5))
        .collect();
    Ok(max_diff_values(&div, &half_dscal))
}

/// div(Hess f) = d(Δf) + S(grad f, ·).
pub fn bochner_lemma_a(geo: &PointGeometry, f: &Jet) -> Result<Residual> {
    let hess = geo.hessian(f)?;
    let lhs = geo.div_covariant2(&hess)?;
    let xi = geo.grad(f)?;
    let d_lap = geo.differential(&geo.trace(&hess))?;
    let s_xi = geo.contract_first(geo.ricci(), &xi);
    let rhs: Vec<Jet> = d_lap.iter().zip(&s_xi).map(|(a, b)| a.add(b)).collect();
    Ok(max_diff_values(&lhs, &rhs))
}

/// (div Hess f)(ξ) = ½Δ|ξ|² − |∇ξ|² with ξ = grad f.
pub fn bochner_lemma_b(geo: &PointGeometry, f: &Jet) -> Result<Residual> {
    let hess = geo.hessian(f)?;
    let xi = geo.grad(f)?;
    let div_hess = geo.div_covariant2(&hess)?;
    let lhs = geo.inner_covectors(&geo.lower(&xi), &div_hess);
    // (div Hess)(ξ) = div_j ξ^j; contract directly
    let lhs_direct = {
        let mut acc = geo.zero();
        for (d, x) in div_hess.iter().zip(&xi) {
            acc.add_assign_product(d, x);
        }
        acc
    };
    debug_assert!((lhs.value() - lhs_direct.value()).abs() <= 1e-8 * (1.0 + lhs.value().abs()));
    let norm2 = geo.inner(&xi, &xi);
    let nabla_norm = geo.norm2_mixed(&geo.nabla_vector(&xi)?);
    let rhs = geo.laplacian(&norm2)?.scale(0.5).sub(&nabla_norm);
    Ok(max_diff_values(
        std::slice::from_ref(&lhs_direct),
        std::slice::from_ref(&rhs),
    ))
}

/// |Hess f − (Δf/n) g|² = |Hess f|² − (Δf)²/n.
pub fn traceless_hessian(geo: &PointGeometry, f: &Jet) -> Result<Residual> {
    let n = geo.dim() as f64;
    let hess = geo.hessian(f)?;
    let lap = geo.trace(&hess);
    let traceless: Vec<Jet> = hess
        .iter()
        .zip(geo.metric())
        .map(|(h, g)| h.sub(&g.mul(&lap).scale(1.0 / n)))
        .collect();
    let lhs = geo.inner2(&traceless, &traceless);
    let rhs = geo.inner2(&hess, &hess).sub(&lap.mul(&lap).scale(1.0 / n));
    Ok(max_diff_values(
        std::slice::from_ref(&lhs),
        std::slice::from_ref(&rhs),
    ))
}

/// Hess f symmetry defect.
pub fn hessian_symmetry(geo: &PointGeometry, f: &Jet) -> Result<Residual> {
    let n = geo.dim();
    let h = geo.hessian(f)?;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((h[i * n + j].value() - h[j * n + i].value()).abs());
            scale = scale.max(h[i * n + j].value().abs());
        }
    }
    Ok(Residual::new(worst, scale))
}
