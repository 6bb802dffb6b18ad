//! Scalar curvature of flat space, the hyperbolic half-space and the round
//! sphere in stereographic coordinates.

use qyamabe::exprjet::parse;
use qyamabe::geometry::{scalar_curvature, Chart, MetricPatch};

fn main() -> qyamabe::Result<()> {
    let flat = MetricPatch::euclidean(3)?;
    let half = Chart::parse("halfspace", &["x", "y", "z"], &["z"])?;
    let hyperbolic = MetricPatch::conformal(half, &parse("z^(-2)")?)?;
    let stereo = Chart::parse("stereographic", &["u", "v", "w"], &[])?;
    let sphere = MetricPatch::conformal(stereo, &parse("4/(1+u^2+v^2+w^2)^2")?)?;

    let p = [0.4, -0.2, 0.8];
    for (name, g, expected) in [
        ("euclidean", &flat, 0.0),
        ("hyperbolic", &hyperbolic, -6.0),
        ("sphere", &sphere, 6.0),
    ] {
        let scal = scalar_curvature(g, &p)?;
        println!("{name:<11} scal = {scal:+.15}  (closed form {expected:+})");
    }
    Ok(())
}
