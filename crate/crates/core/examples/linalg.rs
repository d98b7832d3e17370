// Dense complex matrix toolkit: eigenvalues, functions of matrices, polar form.

use projgeom::linalg::{herm_eig, herm_sqrt, inverse, mat_exp, mat_log_near_identity, op_norm, polar, ComplexMatrix};
use projgeom::sample;

fn main() -> projgeom::Result<()> {
    let mut rng = sample::rng(1);

    let h = sample::hermitian(&mut rng, 4, 1.0);
    let eig = herm_eig(&h)?;
    println!("eigenvalues of a random Hermitian matrix: {:?}", eig.values);
    println!("reconstruction error: {:.2e}", (&eig.map(|x| x) - &h).norm());

    let a = sample::positive(&mut rng, 4, 100.0);
    let s = herm_sqrt(&a)?;
    println!("sqrt(a)^2 - a: {:.2e}", (&(&s * &s) - &a).norm());
    println!("a a^-1 - 1: {:.2e}", (&(&a * &inverse(&a)?) - &ComplexMatrix::identity(4)).norm());

    // log inverts exp near the identity
    let x = sample::complex(&mut rng, 4, 0.1);
    let back = mat_log_near_identity(&mat_exp(&x)?)?;
    println!("log(exp(x)) - x: {:.2e}", (&back - &x).norm());

    let c = sample::complex(&mut rng, 4, 1.0);
    let pf = polar(&c)?;
    println!("polar factors reproduce c: {:.2e}", (&(&pf.unitary * &pf.positive) - &c).norm());
    println!("operator norm of c: {:.6}", op_norm(&c)?);
    Ok(())
}
