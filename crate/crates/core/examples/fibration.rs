// The map (p, a) -> p E_p(a)^-1 a onto idempotents, its series and its cross section.

use projgeom::fibration::{cross_section_checked, phi, phi_block, phi_checked, phi_series_at_identity, SeriesControl};
use projgeom::involution::PositiveElement;
use projgeom::projection::OrthProjection;
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    let mut rng = sample::rng(4);
    let p = OrthProjection::coordinate(4, &[0, 1]);
    let a = PositiveElement::new(sample::positive(&mut rng, 4, 20.0))?;

    let q = phi_checked(&p, &a)?;
    for c in &q.checks {
        println!("{:>14} {:.2e} <= {:.2e} {}", c.name, c.value, c.tolerance, c.pass);
    }
    println!("block formula agrees: {:.2e}", (phi_block(&p, &a)?.matrix() - q.value.matrix()).norm());

    // a = 1 + h with a small Hermitian h
    let h = sample::hermitian_with_norm(&mut rng, 4, 0.5);
    let s = phi_series_at_identity(&p, &h, SeriesControl::default())?;
    let one_plus_h = PositiveElement::new(&projgeom::linalg::ComplexMatrix::identity(4) + &h)?;
    let direct = phi(&p, &one_plus_h)?;
    println!(
        "series: {} terms, error {:.2e}, a priori bound {:.2e}",
        s.terms,
        (s.value.matrix() - direct.matrix()).norm(),
        s.a_priori_bound
    );

    // every idempotent has a canonical preimage
    let target = sample::idempotent(&mut rng, 4, 2.0);
    let section = cross_section_checked(&target)?;
    println!("section lands back on q: {}", section.all_pass());
    println!("rank of the section projection: {}", section.value.p.rank());
    Ok(())
}
