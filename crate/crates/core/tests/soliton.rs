use proptest::prelude::*;
use qyamabe::cli::sample;
use qyamabe::exprjet::parse;
use qyamabe::geometry::{Chart, MetricPatch, ScalarField};
use qyamabe::soliton::{constant_scal_check, fit_constants, SolitonInstance};

fn hyperbolic(lambda: f64, mu: f64) -> (SolitonInstance, Vec<Vec<f64>>) {
    let c = Chart::parse("half", &["x", "y", "z"], &["z"]).unwrap();
    let g = MetricPatch::conformal(c.clone(), &parse("z^(-2)").unwrap()).unwrap();
    let pts = sample(&g, &[[-1.0, 1.0], [-1.0, 1.0], [0.25, 2.0]], 16, 4).unwrap();
    let inst = SolitonInstance::gradient(
        g,
        ScalarField::parse(&c, "-ln(z)").unwrap(),
        ScalarField::constant(&c, lambda),
        ScalarField::constant(&c, mu),
    );
    (inst, pts)
}

#[test]
fn hyperbolic_soliton_constants() {
    let (inst, pts) = hyperbolic(0.0, 0.0);
    let fit = fit_constants(&inst, &pts).unwrap();
    assert!((fit.lambda + 7.0).abs() < 1e-9);
    assert!((fit.mu - 1.0).abs() < 1e-9);
    assert!(fit.identifiable());
    assert!(fit.max_residual < 1e-9);
}

#[test]
fn hand_computed_bochner_terms() {
    // |ξ| = 1, |∇ξ|² = 2 and S(ξ,ξ) = −2 for ξ = grad(−ln z).
    let (inst, pts) = hyperbolic(-7.0, 1.0);
    for p in &pts {
        let sp = inst.at(p).unwrap();
        let geo = sp.geometry();
        assert!((geo.inner(sp.xi(), sp.xi()).value() - 1.0).abs() < 1e-12);
        let nabla = geo.nabla_vector(sp.xi()).unwrap();
        assert!((geo.norm2_mixed(&nabla).value() - 2.0).abs() < 1e-12);
        assert!((geo.bilinear(geo.ricci(), sp.xi(), sp.xi()).value() + 2.0).abs() < 1e-12);
        assert!(sp.bochner_residual().unwrap().within(1e-10));
        assert!(sp
            .gradient_soliton_residual()
            .unwrap()
            .residual()
            .within(1e-10));
        assert!(sp.lambda_quadratic().unwrap().within(1e-10));
        assert!(!sp.lambda_quadratic_printed().unwrap().within(1e-3));
    }
}

#[test]
fn printed_constants_do_not_solve() {
    let (inst, pts) = hyperbolic(-8.0, 2.0);
    let worst = pts
        .iter()
        .map(|p| {
            inst.at(p)
                .unwrap()
                .gradient_soliton_residual()
                .unwrap()
                .residual()
                .normalized()
        })
        .fold(0.0f64, f64::max);
    assert!(worst > 0.1, "{worst}");
}

#[test]
fn constant_scalar_curvature_hypotheses() {
    let (inst, pts) = hyperbolic(-7.0, 1.0);
    let rep = constant_scal_check(&inst, &pts, 4).unwrap();
    assert!(rep.hypotheses_hold(1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // a|x − c|²/2 on flat space solves the equation with λ = −a, μ = 0.
    #[test]
    fn shifted_gaussians(a in 0.2f64..3.0, c in prop::collection::vec(-1.0f64..1.0, 3), p in prop::collection::vec(-1.0f64..1.0, 3)) {
        let g = MetricPatch::euclidean(3).unwrap();
        let ch = g.chart().clone();
        let names = ch.coords();
        let f = names
            .iter()
            .zip(&c)
            .map(|(x, ci)| format!("({x}-({ci:?}))^2"))
            .collect::<Vec<_>>()
            .join("+");
        let inst = SolitonInstance::gradient(
            g,
            ScalarField::parse(&ch, &format!("({a:?})*({f})/2")).unwrap(),
            ScalarField::constant(&ch, -a),
            ScalarField::constant(&ch, 0.0),
        );
        let sp = inst.at(&p).unwrap();
        prop_assert!(sp.gradient_soliton_residual().unwrap().residual().within(1e-10));
        prop_assert!(sp.trace_identity_residual().unwrap().within(1e-10));
        prop_assert!(sp.pairing_identity_residual().unwrap().within(1e-10));
        prop_assert!(sp.bochner_residual().unwrap().within(1e-10));
        prop_assert!(sp.generalized_geodesic_residual().unwrap().residual().within(1e-10));
    }
}
