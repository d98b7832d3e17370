// The involution x -> a^-1 x* a attached to a positive definite a.

use projgeom::involution::{a_adjoint, a_norm, is_a_selfadjoint, star_isomorphism, star_isomorphism_inverse, PositiveElement};
use projgeom::linalg::Tolerance;
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    let mut rng = sample::rng(2);
    let a = PositiveElement::new(sample::positive(&mut rng, 3, 50.0))?;
    let x = sample::complex(&mut rng, 3, 1.0);

    let xa = a_adjoint(&x, &a)?;
    println!("(x^#)^# - x: {:.2e}", (&a_adjoint(&xa, &a)? - &x).norm());

    // x + x^# is a-selfadjoint
    let s = &x + &xa;
    println!("x + x^# is a-selfadjoint: {}", is_a_selfadjoint(&s, &a, Tolerance::default()));

    // the star isomorphism carries * onto #
    let y = star_isomorphism(&x, &a)?;
    let lhs = star_isomorphism(&x.adjoint(), &a)?;
    println!("phi(x*) - phi(x)^#: {:.2e}", (&lhs - &a_adjoint(&y, &a)?).norm());
    println!("round trip: {:.2e}", (&star_isomorphism_inverse(&y, &a)? - &x).norm());
    println!("a-norm {:.6} vs norm of inverse image {:.6}", a_norm(&x, &a)?, star_isomorphism_inverse(&x, &a)?.norm());
    println!("condition number of a: {:.2}", a.condition());
    Ok(())
}
