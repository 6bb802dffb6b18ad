//! Integral identities for a potential on a flat 2-torus, evaluated with the
//! periodic trapezoidal rule.

use std::f64::consts::TAU;

use qyamabe::exprjet::Expr;
use qyamabe::geometry::{Chart, MetricPatch, ScalarField};
use qyamabe::warp::{compact_integral_checks, PeriodicChart, TorusInstance};

fn main() -> qyamabe::Result<()> {
    let chart = Chart::parse("torus", &["x", "y"], &[])?;
    let inst = TorusInstance {
        chart: PeriodicChart::new(chart.clone(), vec![TAU, TAU], vec![64, 64])?,
        metric: MetricPatch::new(chart.clone(), &[1.0, 0.0, 1.0].map(Expr::lit))?,
        f: ScalarField::parse(&chart, "sin(x)+0.5*cos(2*y)+0.3*sin(x+y)")?,
        mu: 0.5,
        phi: ScalarField::constant(&chart, 1.0),
    };
    let rep = compact_integral_checks(&inst, 8, 8)?;
    println!("resolution {:?}", rep.resolution);
    println!(
        "integral of laplacian      {:.3e}",
        rep.divergence_theorem.value
    );
    println!(
        "integration by parts       {:.3e}",
        rep.integration_by_parts.value
    );
    println!(
        "traceless hessian chain    {:.3e}",
        rep.traceless_chain.value
    );
    println!("aggregate identity by resolution:");
    for a in &rep.aggregate_trajectory {
        println!(
            "  {:>4}  terms {:?}  residual {:.6e}",
            a.resolution, a.terms, a.residual.value
        );
    }
    println!(
        "rigidity {:.4}, smallest over {} trials {:.4}",
        rep.rigidity, rep.trials, rep.trial_min_rigidity
    );
    Ok(())
}
