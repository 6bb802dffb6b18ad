mod common;

use common::{canonical_expr, smooth_expr};
use proptest::prelude::*;
use qyamabe::exprjet::{eval_jet, parse, Expr, Func, Jet, JetSpace};
use qyamabe::geometry::{Chart, ScalarField};
use qyamabe::oracle::{partials, relative_error, DEFAULT_STEP};

fn chart() -> Chart {
    Chart::parse("cube", &common::COORDS, &[]).unwrap()
}

fn unit_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

fn jet_strategy() -> impl Strategy<Value = Vec<f64>> {
    // Two variables at order 3: ten coefficients.
    prop::collection::vec(-2.0f64..2.0, 10)
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jets_match_richardson_differences(e in smooth_expr(), p in unit_point()) {
        let c = chart();
        let jet = eval_jet(&e, &c, &p, 2).unwrap();
        let field = ScalarField::new(&c, &e).unwrap();
        let (grad, hess) = partials(&|q: &[f64]| field.eval(q), &p, DEFAULT_STEP).unwrap();
        for i in 0..3 {
            let mut a = [0u8; 3];
            a[i] = 1;
            let d = jet.derivative(&a).unwrap();
            prop_assert!(relative_error(d, grad[i]) < 1e-5, "{e}: d{i} {d} vs {}", grad[i]);
            for j in 0..3 {
                let mut b = [0u8; 3];
                b[i] += 1;
                b[j] += 1;
                let d = jet.derivative(&b).unwrap();
                prop_assert!(relative_error(d, hess[i * 3 + j]) < 1e-5, "{e}: d{i}{j} {d} vs {}", hess[i * 3 + j]);
            }
        }
    }

    #[test]
    fn display_reparses_to_same_tree(e in canonical_expr()) {
        let printed = e.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), e, "{}", printed);
    }

    #[test]
    fn ring_laws(a in jet_strategy(), b in jet_strategy(), c in jet_strategy()) {
        let s = JetSpace::new(2, 3).unwrap();
        let (a, b, c) = (
            Jet::from_coeffs(&s, 3, a).unwrap(),
            Jet::from_coeffs(&s, 3, b).unwrap(),
            Jet::from_coeffs(&s, 3, c).unwrap(),
        );
        prop_assert!(close(&a.mul(&b), &b.mul(&a), 1e-12));
        prop_assert!(close(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c)), 1e-12));
        prop_assert!(close(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c)), 1e-12));
        prop_assert!(close(&a.sub(&a), &Jet::zero(&s, 3), 0.0));
        if a.value().abs() > 0.5 {
            prop_assert!(close(&a.recip().unwrap().mul(&a), &Jet::constant(&s, 3, 1.0), 1e-9));
        }
    }

    #[test]
    fn chain_rule(p in unit_point()) {
        // ∂_x sin(x² + y·z) = 2x cos(x² + y·z), to one order less.
        let c = chart();
        let f = eval_jet(&parse("sin(x^2 + y*z)").unwrap(), &c, &p, 4).unwrap();
        let df = eval_jet(&parse("2*x*cos(x^2 + y*z)").unwrap(), &c, &p, 3).unwrap();
        prop_assert!(close(&f.partial(0).unwrap(), &df, 1e-12));
        let g = eval_jet(&parse("exp(ln(2 + sin(x*y)))").unwrap(), &c, &p, 4).unwrap();
        let h = eval_jet(&parse("2 + sin(x*y)").unwrap(), &c, &p, 4).unwrap();
        prop_assert!(close(&g, &h, 1e-12));
    }

    #[test]
    fn pythagorean_identity(e in smooth_expr(), p in unit_point()) {
        let c = chart();
        let s = eval_jet(&Expr::call(Func::Sin, e.clone()), &c, &p, 4).unwrap();
        let co = eval_jet(&Expr::call(Func::Cos, e.clone()), &c, &p, 4).unwrap();
        let one = s.mul(&s).add(&co.mul(&co));
        prop_assert!(close(&one, &Jet::constant(one.space(), 4, 1.0), 1e-9));
    }
}

#[test]
fn order_and_domain_errors() {
    let c = Chart::parse("half", &["x", "y", "z"], &["z"]).unwrap();
    assert!(eval_jet(&parse("x").unwrap(), &c, &[0.0, 0.0, -1.0], 2).is_err());
    let j = eval_jet(&parse("x*y").unwrap(), &c, &[1.0, 2.0, 1.0], 2).unwrap();
    assert!(j.derivative(&[2, 1, 0]).is_err());
    assert_eq!(j.derivative(&[1, 1, 0]).unwrap(), 1.0);
    assert!(eval_jet(&parse("ln(x)").unwrap(), &c, &[-1.0, 0.0, 1.0], 2).is_err());
    assert!(parse("sin(x").is_err());
}
