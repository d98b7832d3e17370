// Idempotents, orthogonal projections, and the affine slice of idempotents with range p.

use projgeom::linalg::{ComplexMatrix, Tolerance};
use projgeom::projection::{
    blocks, cond_expectation_checked, in_qp, kernel_projection, kerzman_stein, orth_from_idempotent, qp_coordinates,
    Idempotent, OrthProjection,
};
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    let q = Idempotent::new(ComplexMatrix::real(&[1.0, 0.5, 0.0, 0.0]))?;
    let p = orth_from_idempotent(&q)?;
    println!("projection onto the range of q: {:?}", p.matrix().as_slice());
    println!("Kerzman-Stein agrees: {:.2e}", (kerzman_stein(&q)?.matrix() - p.matrix()).norm());
    println!("projection onto the kernel: {:?}", kernel_projection(&q)?.matrix().as_slice());

    // q = p + corner, with the corner in p M (1 - p)
    println!("q lies over p: {}", in_qp(&q, &p, Tolerance::default()));
    println!("corner coordinates: {:?}", qp_coordinates(&q, &p)?.as_slice());

    let mut rng = sample::rng(3);
    let p = OrthProjection::coordinate(4, &[0, 2]);
    let x = sample::complex(&mut rng, 4, 1.0);
    let b = blocks(&x, &p)?;
    println!("blocks reassemble: {:.2e}", (&b.reassemble() - &x).norm());
    let e = cond_expectation_checked(&x, &p)?;
    for c in &e.checks {
        println!("  {} = {:.2e} (tolerance {:.0e}) {}", c.name, c.value, c.tolerance, c.pass);
    }
    Ok(())
}
