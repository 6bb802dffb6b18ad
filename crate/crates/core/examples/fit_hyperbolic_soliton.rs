//! Fit constant (λ, μ) for the potential f = −ln z on hyperbolic space and
//! compare with the constants (−8, 2).

use qyamabe::cli::{sample, SAMPLER};
use qyamabe::exprjet::parse;
use qyamabe::geometry::{Chart, MetricPatch, ScalarField};
use qyamabe::soliton::{fit_constants, SolitonInstance};

fn main() -> qyamabe::Result<()> {
    let chart = Chart::parse("halfspace", &["x", "y", "z"], &["z"])?;
    let g = MetricPatch::conformal(chart.clone(), &parse("z^(-2)")?)?;
    let f = ScalarField::parse(&chart, "-ln(z)")?;
    let points = sample(&g, &[[-1.0, 1.0], [-1.0, 1.0], [0.25, 2.0]], 32, 4)?;
    println!("{} points from {SAMPLER}", points.len());

    let probe = SolitonInstance::gradient(
        g.clone(),
        f.clone(),
        ScalarField::constant(&chart, 0.0),
        ScalarField::constant(&chart, 0.0),
    );
    let fit = fit_constants(&probe, &points)?;
    println!(
        "fitted lambda = {:.12}, mu = {:.12}, max residual {:.2e}",
        fit.lambda, fit.mu, fit.max_residual
    );

    for (lambda, mu) in [(fit.lambda, fit.mu), (-8.0, 2.0)] {
        let inst = probe.with_coefficients(
            ScalarField::constant(&chart, lambda),
            ScalarField::constant(&chart, mu),
        );
        let mut worst = 0.0f64;
        for p in &points {
            worst = worst.max(
                inst.at(p)?
                    .gradient_soliton_residual()?
                    .residual()
                    .normalized(),
            );
        }
        println!("(lambda, mu) = ({lambda:.3}, {mu:.3}): soliton residual {worst:.3e}");
    }
    Ok(())
}
