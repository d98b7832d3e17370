// Geodesics t -> e^{t[x,p]} p e^{-t[x,p]} and how to connect two projections.

use projgeom::geodesic::{connect_checked, geodesic, short_geodesic_p, unigeo_check, TangentVector};
use projgeom::involution::PositiveElement;
use projgeom::linalg::{ComplexMatrix, Tolerance};
use projgeom::projection::{Idempotent, OrthProjection};
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    // rotation of a line in the plane by theta
    let theta = 0.4_f64;
    let p = OrthProjection::coordinate(2, &[0]);
    let v = TangentVector::at_projection(&p, ComplexMatrix::real(&[0.0, theta, theta, 0.0]))?;
    let g = geodesic(v);
    let r = g.endpoint()?;
    println!("length {:.12} for angle {theta}", g.length(0.0, 1.0)?);
    println!("distance {:.12} = sin(theta) {:.12}", (r.matrix() - p.matrix()).norm(), theta.sin());

    // recover the velocity from the endpoint
    let back = connect_checked(&p, &r)?;
    println!("connect passes its checks: {}", back.all_pass());
    println!("velocity recovered: {:.2e}", (back.value.velocity.matrix() - g.direction().matrix()).norm());

    // an oblique target in a larger space
    let mut rng = sample::rng(6);
    let p = sample::orth_projection(&mut rng, 4, 2);
    let q = Idempotent::new(p.matrix() + &sample::corner(&mut rng, &p, 0.5))?;
    let c = connect_checked(&p, &q)?;
    println!("oblique connect passes: {}", c.all_pass());

    // projections commuting with a see the same geodesics in both geometries
    let p = OrthProjection::coordinate(4, &[0, 1]);
    let r = OrthProjection::new(ComplexMatrix::real(&[
        0.5, 0.0, 0.5, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.5, 0.0, 0.5, 0.0, //
        0.0, 0.0, 0.0, 0.0,
    ]))?;
    let short = short_geodesic_p(&p, &r)?;
    println!("short geodesic length {:.12}", short.length(0.0, 1.0)?);
    let a = PositiveElement::new(ComplexMatrix::diag_real(&[2.0, 3.0, 2.0, 5.0]))?;
    let report = unigeo_check(&p, &r, &a, Tolerance::default())?;
    println!("norm gap {:.2e}, length gap {:.2e}, all pass {}", report.norm_gap, report.length_gap, report.all_pass());
    Ok(())
}
