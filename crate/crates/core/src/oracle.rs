//! Finite-difference reference derivatives.
//!
//! These work on plain `f64` evaluation only and share no code with the jet
//! arithmetic, so they serve as an independent check on it. Central
//! differences are refined by two levels of Richardson extrapolation.

use crate::error::Result;
use crate::geometry::{scalar_curvature, MetricPatch};

/// Default base step.
pub const DEFAULT_STEP: f64 = 1e-2;

fn shifted(p: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut q = p.to_vec();
    for &(i, d) in moves {
        q[i] += d;
    }
    q
}

/// Three-level Richardson table for an O(h²) estimate.
fn richardson(d: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let (d1, d2, d3) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// ∂_i f at `p`.
pub fn first_partial<F>(f: &F, p: &[f64], i: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    richardson(
        |h| Ok((f(&shifted(p, &[(i, h)]))? - f(&shifted(p, &[(i, -h)]))?) / (2.0 * h)),
        h,
    )
}

/// ∂_i∂_j f at `p`.
pub fn second_partial<F>(f: &F, p: &[f64], i: usize, j: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if i == j {
        let f0 = f(p)?;
        richardson(
            |h| Ok((f(&shifted(p, &[(i, h)]))? - 2.0 * f0 + f(&shifted(p, &[(i, -h)]))?) / (h * h)),
            h,
        )
    } else {
        richardson(
            |h| {
                let pp = f(&shifted(p, &[(i, h), (j, h)]))?;
                let pm = f(&shifted(p, &[(i, h), (j, -h)]))?;
                let mp = f(&shifted(p, &[(i, -h), (j, h)]))?;
                let mm = f(&shifted(p, &[(i, -h), (j, -h)]))?;
                Ok((pp - pm - mp + mm) / (4.0 * h * h))
            },
            h,
        )
    }
}

/// Gradient and full Hessian (row-major) of `f` at `p`.
pub fn partials<F>(f: &F, p: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = p.len();
    let grad = (0..n)
        .map(|i| first_partial(f, p, i, h))
        .collect::<Result<_>>()?;
    let mut hess = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = second_partial(f, p, i, j, h)?;
            hess[i * n + j] = v;
            hess[j * n + i] = v;
        }
    }
    Ok((grad, hess))
}

/// Coordinate derivatives of the scalar curvature by differencing
/// [`scalar_curvature`] itself.
pub fn scalar_curvature_partials(
    g: &MetricPatch,
    p: &[f64],
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    partials(&|q: &[f64]| scalar_curvature(g, q), p, h)
}

/// Relative agreement |a − b| / (1 + max(|a|, |b|)).
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
