//! The Bochner-type formula and the identities derived from the soliton
//! equation, on the Gaussian soliton and on hyperbolic space.

use qyamabe::exprjet::parse;
use qyamabe::geometry::{Chart, MetricPatch, ScalarField};
use qyamabe::soliton::SolitonInstance;

fn report(name: &str, inst: &SolitonInstance, p: &[f64]) -> qyamabe::Result<()> {
    let sp = inst.at(p)?;
    println!("{name} at {p:?}");
    println!(
        "  soliton equation   {:.3e}",
        sp.gradient_soliton_residual()?.residual().normalized()
    );
    println!(
        "  trace identity     {:.3e}",
        sp.trace_identity_residual()?.normalized()
    );
    println!(
        "  pairing identity   {:.3e}",
        sp.pairing_identity_residual()?.normalized()
    );
    println!(
        "  lambda quadratic   {:.3e}",
        sp.lambda_quadratic()?.normalized()
    );
    println!(
        "  bochner formula    {:.3e}",
        sp.bochner_residual()?.normalized()
    );
    Ok(())
}

fn main() -> qyamabe::Result<()> {
    let flat = MetricPatch::euclidean(3)?;
    let c = flat.chart().clone();
    let names = c.coords().join("^2+") + "^2";
    let gaussian = SolitonInstance::gradient(
        flat,
        ScalarField::parse(&c, &format!("({names})/2"))?,
        ScalarField::constant(&c, -1.0),
        ScalarField::constant(&c, 0.0),
    );
    report("gaussian soliton", &gaussian, &[0.5, -1.0, 0.25])?;

    let half = Chart::parse("halfspace", &["x", "y", "z"], &["z"])?;
    let hyp = SolitonInstance::gradient(
        MetricPatch::conformal(half.clone(), &parse("z^(-2)")?)?,
        ScalarField::parse(&half, "-ln(z)")?,
        ScalarField::constant(&half, -7.0),
        ScalarField::constant(&half, 1.0),
    );
    report("hyperbolic half-space", &hyp, &[0.1, 0.3, 0.7])?;
    Ok(())
}
