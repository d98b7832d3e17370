// Polar retraction of idempotents onto orthogonal projections and its a-twisted variant.

use projgeom::involution::PositiveElement;
use projgeom::linalg::Tolerance;
use projgeom::polar::{
    buckholtz_checked, omega_a, omega_a_inverse_checked, omega_checked, omega_phi_move_checked, orbit_check,
    to_symmetry,
};
use projgeom::projection::OrthProjection;
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    let mut rng = sample::rng(5);
    let q = sample::idempotent(&mut rng, 4, 1.5);
    let r = omega_checked(&q)?;
    println!("omega(q) passes its checks: {}", r.all_pass());
    println!("symmetry 2q - 1 squares to one: {:.2e}", {
        let e = to_symmetry(&q);
        (&(e.matrix() * e.matrix()) - &projgeom::linalg::ComplexMatrix::identity(4)).norm()
    });

    let (_, b) = buckholtz_checked(&q)?;
    println!("{}: {:.2e}", b.name, b.value);

    let a = PositiveElement::new(sample::positive(&mut rng, 4, 10.0))?;
    // the unique a-selfadjoint idempotent over a given projection
    let r = sample::orth_projection(&mut rng, 4, 2);
    let qa = omega_a_inverse_checked(&r, &a)?;
    println!("a-selfadjoint lift passes its checks: {}", qa.all_pass());
    println!("omega_a undoes the lift: {:.2e}", (omega_a(&qa.value, &a)?.matrix() - r.matrix()).norm());

    // moving p along the fiber of a
    let p = OrthProjection::coordinate(4, &[0]);
    let moved = omega_phi_move_checked(&p, &a)?;
    for c in &moved.checks {
        println!("{:>22} {:.2e} {}", c.name, c.value, c.pass);
    }
    let orbit = orbit_check(&p, &moved.value, Tolerance::default());
    println!("moved projection stays in the orbit ball: {} ({:.4})", orbit.pass, orbit.value);
    Ok(())
}
