mod common;

use qyamabe::exprjet::parse;
use qyamabe::geometry::identities::{
    bochner_lemma_a, bochner_lemma_b, contracted_bianchi, hessian_symmetry, metric_compatibility,
    riemann_symmetries, traceless_hessian,
};
use qyamabe::geometry::{ricci, riemann, scalar_curvature, Chart, MetricPatch, PointGeometry};
use qyamabe::oracle::{partials, relative_error, scalar_curvature_partials, DEFAULT_STEP};
use qyamabe::Error;

fn hyperbolic() -> MetricPatch {
    let c = Chart::parse("half", &["x", "y", "z"], &["z"]).unwrap();
    MetricPatch::conformal(c, &parse("z^(-2)").unwrap()).unwrap()
}

fn sphere(m: usize) -> MetricPatch {
    let names: Vec<String> = (0..m).map(|i| format!("u{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let sum = names
        .iter()
        .map(|n| format!("{n}^2"))
        .collect::<Vec<_>>()
        .join("+");
    let c = Chart::parse("stereo", &refs, &[]).unwrap();
    MetricPatch::conformal(c, &parse(&format!("4/(1+{sum})^2")).unwrap()).unwrap()
}

#[test]
fn space_form_curvatures() {
    let p = [0.3, -0.2, 0.9];
    assert!(
        scalar_curvature(&MetricPatch::euclidean(3).unwrap(), &p)
            .unwrap()
            .abs()
            < 1e-12
    );
    assert!((scalar_curvature(&hyperbolic(), &p).unwrap() + 6.0).abs() < 1e-10);
    for m in 2..=4 {
        let q = vec![0.2; m];
        let expected = (m * (m - 1)) as f64;
        assert!((scalar_curvature(&sphere(m), &q).unwrap() - expected).abs() < 1e-10);
    }
}

#[test]
fn riemann_sign_convention() {
    // Sectional curvature −1 on the hyperbolic half-space: R_xyxy = −g_xx g_yy.
    let p = [0.0, 0.0, 0.5];
    let (_, lowered) = riemann(&hyperbolic(), &p).unwrap();
    let gxx = 4.0;
    assert!((lowered.get(&[0, 1, 0, 1]) + gxx * gxx).abs() < 1e-10);
    // Unit 3-sphere: Ric = 2g.
    let q = [0.1, 0.2, -0.3];
    let ric = ricci(&sphere(3), &q).unwrap();
    let g = sphere(3).eval(&q).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((ric.get(&[i, j]) - 2.0 * g[i * 3 + j]).abs() < 1e-10);
        }
    }
}

#[test]
fn identities_on_random_metrics() {
    for seed in 0..6 {
        let (g, bounds) = common::random_conformal(seed);
        let f = common::potential(&g);
        for p in common::points(&g, &bounds, 4, seed) {
            let geo = PointGeometry::new(&g, &p, 4).unwrap();
            let fj = geo.scalar(&f).unwrap();
            assert!(riemann_symmetries(&geo).within(1e-9));
            assert!(metric_compatibility(&geo).unwrap().within(1e-9));
            assert!(contracted_bianchi(&geo).unwrap().within(1e-9));
            assert!(bochner_lemma_a(&geo, &fj).unwrap().within(1e-9));
            assert!(bochner_lemma_b(&geo, &fj).unwrap().within(1e-9));
            assert!(traceless_hessian(&geo, &fj).unwrap().within(1e-9));
            assert!(hessian_symmetry(&geo, &fj).unwrap().within(1e-9));
        }
    }
}

#[test]
fn scalar_curvature_derivatives_match_differences() {
    let (g, bounds) = common::random_conformal(3);
    let p = &common::points(&g, &bounds, 1, 11)[0];
    let geo = PointGeometry::new(&g, p, 4).unwrap();
    let (grad, hess) = scalar_curvature_partials(&g, p, DEFAULT_STEP).unwrap();
    let n = g.dim();
    for i in 0..n {
        let mut a = vec![0u8; n];
        a[i] = 1;
        assert!(relative_error(geo.scal().derivative(&a).unwrap(), grad[i]) < 1e-5);
        for j in 0..n {
            let mut b = vec![0u8; n];
            b[i] += 1;
            b[j] += 1;
            assert!(relative_error(geo.scal().derivative(&b).unwrap(), hess[i * n + j]) < 1e-5);
        }
    }
    let (mg, _) = partials(&|q: &[f64]| Ok(g.eval(q)?[0]), p, DEFAULT_STEP).unwrap();
    assert!(
        relative_error(
            geo.metric()[0]
                .derivative(&{
                    let mut a = vec![0u8; n];
                    a[0] = 1;
                    a
                })
                .unwrap(),
            mg[0]
        ) < 1e-5
    );
}

#[test]
fn rejects_degenerate_input() {
    let c = Chart::parse("plane", &["x", "y"], &[]).unwrap();
    let g = MetricPatch::new(
        c.clone(),
        &[
            parse("1").unwrap(),
            parse("2").unwrap(),
            parse("1").unwrap(),
        ],
    )
    .unwrap();
    assert!(matches!(
        PointGeometry::new(&g, &[0.0, 0.0], 2),
        Err(Error::NotPositiveDefinite { .. })
    ));
    let e = MetricPatch::euclidean(2).unwrap();
    assert!(PointGeometry::new(&e, &[0.0, 0.0], 1).is_err());
    assert!(MetricPatch::new(c, &[parse("1").unwrap()]).is_err());
}
