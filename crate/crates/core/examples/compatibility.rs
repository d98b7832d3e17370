// Deciding whether a geodesic is also a geodesic for some twisted involution.

use projgeom::geodesic::{compatible_star, omega_fiber_star};
use projgeom::linalg::{mat_exp, ComplexMatrix};
use projgeom::projection::{Idempotent, OrthProjection};
use projgeom::sample;

fn report(label: &str, v: &projgeom::geodesic::CompatibilityVerdict) {
    println!(
        "{label}: {:?} ({:?}), min eigenvalue {:.3e}, nullspace {}, restarts {}",
        v.status, v.certificate, v.min_eigenvalue, v.nullspace_dim, v.restarts_used
    );
}

fn main() -> projgeom::Result<()> {
    let p = OrthProjection::coordinate(2, &[0]);

    // upper triangular idempotents over p admit no compatible weight
    let q = Idempotent::new(ComplexMatrix::real(&[1.0, 0.5, 0.0, 0.0]))?;
    report("triangular", &compatible_star(&p, &q, 0)?);

    // a corner relation y = -c x* b produces a diagonal witness
    let x = ComplexMatrix::real(&[0.0, 0.1, -0.6, 0.0]);
    let q = Idempotent::new(&(&mat_exp(&x)? * p.matrix()) * &mat_exp(&-x.clone())?)?;
    let v = compatible_star(&p, &q, 0)?;
    report("constructed", &v);
    if let Some(w) = &v.witness {
        println!("  witness diagonal {:.6} {:.6}", w.matrix()[(0, 0)].re, w.matrix()[(1, 1)].re);
    }
    report("same pair, flipped sign", &omega_fiber_star(&p, &q, 0)?);

    // random instances built to be compatible
    let mut rng = sample::rng(7);
    for n in 3..6 {
        let pair = sample::compatible_pair(&mut rng, n, false, 0.9);
        report(&format!("random n = {n}"), &compatible_star(&pair.p, &pair.q, 1)?);
    }
    Ok(())
}
