//! Parse an expression and read exact partial derivatives off its jet,
//! next to a finite-difference estimate.

use qyamabe::exprjet::{eval_jet, parse};
use qyamabe::geometry::{Chart, ScalarField};
use qyamabe::oracle::{partials, DEFAULT_STEP};

fn main() -> qyamabe::Result<()> {
    let chart = Chart::parse("plane", &["x", "y"], &[])?;
    let expr = parse("exp(x)*sin(y) + x^3*y")?;
    println!("f = {expr}");

    let p = [0.3, -0.7];
    let jet = eval_jet(&expr, &chart, &p, 4)?;
    let field = ScalarField::new(&chart, &expr)?;
    let (grad, hess) = partials(&|q: &[f64]| field.eval(q), &p, DEFAULT_STEP)?;

    println!("{:>8} {:>22} {:>22}", "partial", "jet", "richardson");
    for (name, alpha, fd) in [
        ("f_x", [1, 0], grad[0]),
        ("f_y", [0, 1], grad[1]),
        ("f_xx", [2, 0], hess[0]),
        ("f_xy", [1, 1], hess[1]),
        ("f_yy", [0, 2], hess[3]),
    ] {
        println!("{name:>8} {:>22.15e} {fd:>22.15e}", jet.derivative(&alpha)?);
    }
    println!("f_xxxy = {:.15e}", jet.derivative(&[3, 1])?);
    Ok(())
}
