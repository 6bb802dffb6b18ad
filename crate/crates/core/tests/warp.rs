mod common;

use std::f64::consts::TAU;

use qyamabe::exprjet::parse;
use qyamabe::geometry::{Chart, MetricPatch, ScalarField};
use qyamabe::warp::{
    build_warped, compact_integral_checks, divergence_identities, lift_checks, torus_integral,
    verify_warped_soliton, warped_scal_crosscheck, PeriodicChart, TorusInstance,
};

fn line() -> MetricPatch {
    MetricPatch::new(
        Chart::parse("line", &["t"], &[]).unwrap(),
        &[parse("1").unwrap()],
    )
    .unwrap()
}

fn sphere2() -> MetricPatch {
    let c = Chart::parse("S2", &["u", "v"], &[]).unwrap();
    MetricPatch::conformal(c, &parse("4/(1+u^2+v^2)^2").unwrap()).unwrap()
}

#[test]
fn scalar_curvature_formula_on_random_products() {
    for seed in 0..8 {
        let (wp, pts) = common::random_warped(seed);
        for p in &pts {
            let r = warped_scal_crosscheck(&wp, p).unwrap();
            assert!(r.within(1e-8), "seed {seed} at {p:?}: {r:?}");
        }
    }
}

#[test]
fn lifted_gradient_and_hessian() {
    for seed in 0..4 {
        let (wp, pts) = common::random_warped(seed);
        let b = wp.base().chart();
        let f = ScalarField::parse(
            b,
            if b.dim() == 1 {
                "sin(s)+s^2"
            } else {
                "sin(s)*r+r^2"
            },
        )
        .unwrap();
        let r = lift_checks(&wp, &f, &pts).unwrap();
        assert!(r.gradient.within(1e-10) && r.hessian.within(1e-10), "{r:?}");
    }
}

#[test]
fn witness_and_perturbation() {
    let wp = build_warped(&line(), &sphere2(), &parse("exp(t)").unwrap(), &[vec![0.0]]).unwrap();
    let b = wp.base().chart();
    let f = ScalarField::parse(b, "t").unwrap();
    let mu = ScalarField::constant(b, 1.0);
    let pts: Vec<Vec<f64>> = [-1.0, -0.3, 0.0, 0.6, 1.0]
        .iter()
        .map(|&t| vec![t, 0.2, -0.5])
        .collect();
    let ok = verify_warped_soliton(
        &wp,
        &f,
        &ScalarField::parse(b, "2*exp(-2*t)-7").unwrap(),
        &mu,
        &pts,
        1e-8,
    )
    .unwrap();
    assert!(ok.hypotheses_hold(1e-8) && ok.base_ok(1e-8) && ok.product_ok(1e-8));
    assert!((ok.fiber_scal_required - 2.0).abs() < 1e-10);
    assert!(ok.fiber_hessian_max.within(1e-10));
    let off = verify_warped_soliton(
        &wp,
        &f,
        &ScalarField::parse(b, "2*exp(-2*t)-6.9").unwrap(),
        &mu,
        &pts,
        1e-8,
    )
    .unwrap();
    assert!(off.base_condition_max.within(1e-8));
    assert!(!off.product_ok(1e-8));
}

#[test]
fn warping_must_be_positive() {
    assert!(build_warped(&line(), &sphere2(), &parse("t").unwrap(), &[vec![-0.5]]).is_err());
    let half = Chart::parse("ray", &["t"], &["t"]).unwrap();
    let ray = MetricPatch::new(half, &[parse("1").unwrap()]).unwrap();
    assert!(build_warped(&ray, &sphere2(), &parse("t").unwrap(), &[vec![0.5]]).is_ok());
}

#[test]
fn divergence_auxiliaries_on_curved_base() {
    let c = Chart::parse("B", &["x", "y"], &[]).unwrap();
    let g = MetricPatch::conformal(c.clone(), &parse("exp(0.3*x-0.2*x*y)").unwrap()).unwrap();
    let f = ScalarField::parse(&c, "sin(x)*y+x^2").unwrap();
    let mu = ScalarField::parse(&c, "0.5+0.1*y").unwrap();
    let phi = ScalarField::parse(&c, "2+sin(x+y)").unwrap();
    for p in common::points(&g, &[[-1.0, 1.0], [-1.0, 1.0]], 8, 3) {
        let d = divergence_identities(&g, &f, &mu, &phi, &p).unwrap();
        assert!(d.hessian_divergence.within(1e-9));
        assert!(d.div_phi_aux.within(1e-9));
        assert!(d.div_mu_aux.within(1e-9));
    }
}

#[test]
fn torus_quadrature() {
    let c = Chart::parse("T", &["x", "y"], &[]).unwrap();
    let pc = PeriodicChart::new(c.clone(), vec![TAU, TAU], vec![64, 64]).unwrap();
    let g = MetricPatch::conformal(c.clone(), &parse("1+0.25*sin(x)*cos(y)").unwrap()).unwrap();
    let one = ScalarField::constant(&c, 1.0);
    let area = torus_integral(&pc, &g, &one).unwrap();
    // ∫(1 + sin x cos y/4) over the square is 4π².
    assert!((area - TAU * TAU).abs() < 1e-10);
    let inst = TorusInstance {
        chart: pc,
        metric: g,
        f: ScalarField::parse(&c, "sin(x)*cos(y)+0.4*cos(2*x)").unwrap(),
        mu: 0.7,
        phi: ScalarField::parse(&c, "2+sin(x+y)").unwrap(),
    };
    let rep = compact_integral_checks(&inst, 4, 1).unwrap();
    assert!(rep.divergence_theorem.value.abs() < 1e-10);
    assert!(rep.integration_by_parts.value.abs() < 1e-7);
    assert!(rep.traceless_chain.value.abs() < 1e-7);
    assert_eq!(rep.aggregate_trajectory.len(), 4);
    let non_periodic = TorusInstance {
        f: ScalarField::parse(&c, "x").unwrap(),
        ..inst
    };
    assert!(compact_integral_checks(&non_periodic, 1, 1).is_err());
}
