//! Generators shared by the integration suites.
#![allow(dead_code)]

use proptest::prelude::*;
use qyamabe::cli::sample;
use qyamabe::exprjet::{parse, BinOp, Expr, Func};
use qyamabe::geometry::{Chart, MetricPatch};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const COORDS: [&str; 3] = ["x", "y", "z"];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        prop::sample::select(COORDS.to_vec()).prop_map(Expr::coord),
        (0.1f64..2.0).prop_map(|v| Expr::lit((v * 100.0).round() / 100.0)),
    ]
}

/// Smooth expressions that are finite everywhere on the unit cube.
pub fn smooth_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Mul, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                let den = Expr::binary(
                    BinOp::Add,
                    Expr::lit(1.0),
                    Expr::binary(BinOp::Pow, b, Expr::lit(2.0)),
                );
                Expr::binary(BinOp::Div, a, den)
            }),
            (inner.clone(), 2u8..4).prop_map(|(a, k)| Expr::binary(
                BinOp::Pow,
                a,
                Expr::lit(k as f64)
            )),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (
                inner.clone(),
                prop::sample::select(vec![Func::Sin, Func::Cos, Func::Tanh])
            )
                .prop_map(|(a, f)| Expr::call(f, a)),
            inner
                .clone()
                .prop_map(|a| Expr::call(Func::Exp, Expr::call(Func::Sin, a))),
            inner.clone().prop_map(|a| {
                let sq = Expr::binary(BinOp::Pow, a, Expr::lit(2.0));
                Expr::call(Func::Ln, Expr::binary(BinOp::Add, Expr::lit(1.0), sq))
            }),
            inner.prop_map(|a| {
                Expr::call(
                    Func::Sqrt,
                    Expr::binary(BinOp::Add, Expr::lit(2.0), Expr::call(Func::Cos, a)),
                )
            }),
        ]
    })
}

/// Trees as the parser produces them: no negated literals.
pub fn canonical_expr() -> impl Strategy<Value = Expr> {
    smooth_expr().prop_map(canonicalize)
}

fn canonicalize(e: Expr) -> Expr {
    match e {
        Expr::Neg(a) => match canonicalize(*a) {
            Expr::Lit(v) => Expr::Lit(-v),
            a => Expr::Neg(Box::new(a)),
        },
        Expr::Binary(op, a, b) => Expr::binary(op, canonicalize(*a), canonicalize(*b)),
        Expr::Call(f, a) => Expr::call(f, canonicalize(*a)),
        e => e,
    }
}

/// A conformal metric e^{2u}δ or (1 + Σ squares)·δ on a box around the
/// origin, with seeded random coefficients.
pub fn random_conformal(seed: u64) -> (MetricPatch, Vec<[f64; 2]>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 + (seed % 3) as usize;
    let coords: Vec<&str> = ["x", "y", "z", "w"][..dim].to_vec();
    let mut c = || (rng.gen_range(-0.6..0.6f64) * 1000.0).round() / 1000.0;
    let factor = if seed.is_multiple_of(2) {
        let mut u = Vec::new();
        for (i, x) in coords.iter().enumerate() {
            u.push(format!("({})*{x}", c()));
            u.push(format!("({})*{x}*{}", c(), coords[(i + 1) % dim]));
        }
        format!("exp(2*({}))", u.join("+"))
    } else {
        let mut s = vec!["1".to_string()];
        for (i, x) in coords.iter().enumerate() {
            s.push(format!(
                "(({})*{x}+({})*{}^2)^2",
                c(),
                c(),
                coords[(i + 1) % dim]
            ));
        }
        s.join("+")
    };
    let chart = Chart::parse(&format!("conformal-{seed}"), &coords, &[]).unwrap();
    let g = MetricPatch::conformal(chart, &parse(&factor).unwrap()).unwrap();
    (g, vec![[-1.0, 1.0]; dim])
}

pub fn points(g: &MetricPatch, bounds: &[[f64; 2]], count: usize, seed: u64) -> Vec<Vec<f64>> {
    sample(g, bounds, count, seed).unwrap()
}

/// Potential used with random metrics.
pub fn potential(g: &MetricPatch) -> qyamabe::geometry::ScalarField {
    let c = g.chart().coords();
    let src = match c.len() {
        2 => "sin(x)*y + x^2*exp(y/3)".to_string(),
        _ => format!("sin(x)*{l} + x^2*exp(y/3) + cos(y*{l})", l = c[c.len() - 1]),
    };
    qyamabe::geometry::ScalarField::parse(g.chart(), &src).unwrap()
}

/// A random warped product: a 1- or 2-dimensional conformal base in (s, r),
/// a 2- or 3-dimensional conformal fiber in (u, v, w) and a positive warping
/// function. Returns the product and product-chart sample points.
pub fn random_warped(seed: u64) -> (qyamabe::warp::WarpedProduct, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let mut c = || (rng.gen_range(-0.5..0.5f64) * 1000.0).round() / 1000.0;
    let n = 1 + (seed % 2) as usize;
    let m = 2 + (seed / 2 % 2) as usize;
    let bc: Vec<&str> = ["s", "r"][..n].to_vec();
    let fc: Vec<&str> = ["u", "v", "w"][..m].to_vec();
    let bf = match n {
        1 => format!("exp(({})*s)", c()),
        _ => format!("1+(({})*s+({})*r^2)^2", c(), c()),
    };
    let ff = format!(
        "exp(2*({}))",
        fc.iter()
            .map(|x| format!("({})*{x}", c()))
            .collect::<Vec<_>>()
            .join("+")
    );
    let phi = match n {
        1 => format!("exp(({})*s)+0.5", c()),
        _ => format!("1.5+0.5*sin(({})*s+({})*r)", c(), c()),
    };
    let base =
        MetricPatch::conformal(Chart::parse("B", &bc, &[]).unwrap(), &parse(&bf).unwrap()).unwrap();
    let fiber =
        MetricPatch::conformal(Chart::parse("F", &fc, &[]).unwrap(), &parse(&ff).unwrap()).unwrap();
    let base_pts = points(&base, &vec![[-1.0, 1.0]; n], 4, seed);
    let wp = qyamabe::warp::build_warped(&base, &fiber, &parse(&phi).unwrap(), &base_pts).unwrap();
    let pts = points(wp.product(), &vec![[-1.0, 1.0]; n + m], 4, seed);
    (wp, pts)
}
