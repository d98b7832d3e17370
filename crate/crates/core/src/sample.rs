//! Seeded random instance generators.
//!
//! Every generator takes the caller's RNG so that a fixed seed reproduces the
//! same instance stream. The CLI and the test suites use [`ChaCha8Rng`].

use rand::Rng;
use rand_distr::StandardNormal;

pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::involution::PositiveElement;
use crate::linalg::{c64, Complex64, ComplexMatrix};
use crate::projection::{Idempotent, OrthProjection};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

/// Complex Gaussian matrix with entries of variance `scale^2 / n`.
pub fn complex<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    let s = scale / (2.0 * n as f64).sqrt();
    ComplexMatrix::from_fn(n, |_, _| gaussian(rng) * s)
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> ComplexMatrix {
    complex(rng, n, scale).hermitian_part()
}

/// Hermitian matrix rescaled to operator norm exactly `norm` (zero if `n`
/// draws a zero matrix, which has probability zero).
pub fn hermitian_with_norm<R: Rng + ?Sized>(rng: &mut R, n: usize, norm: f64) -> ComplexMatrix {
    let h = hermitian(rng, n, 1.0);
    let hn = h.norm();
    if hn == 0.0 {
        h
    } else {
        h.scale(norm / hn)
    }
}

/// Haar-like unitary from modified Gram-Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = complex(rng, n, 1.0);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        for prev in done.iter() {
            let dot: Complex64 = prev.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            for (z, pk) in col.iter_mut().zip(prev) {
                *z -= dot * pk;
            }
        }
        let nrm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= nrm;
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// Log-uniform spectrum in `[1, kappa]` with both endpoints present, where
/// `kappa` is itself log-uniform in `[1, cond_max]`.
fn spectrum<R: Rng + ?Sized>(rng: &mut R, n: usize, cond_max: f64) -> Vec<f64> {
    let kappa = cond_max.max(1.0).powf(rng.random::<f64>());
    (0..n)
        .map(|i| match i {
            0 => 1.0,
            _ if i == n - 1 => kappa,
            _ => kappa.powf(rng.random::<f64>()),
        })
        .collect()
}

/// Positive definite matrix with condition number at most `cond_max` and a
/// random overall scale in `[0.5, 2]`.
pub fn positive<R: Rng + ?Sized>(rng: &mut R, n: usize, cond_max: f64) -> ComplexMatrix {
    let u = unitary(rng, n);
    let scale = 2f64.powf(rng.random_range(-1.0..1.0));
    let d = ComplexMatrix::diag_real(&spectrum(rng, n, cond_max).iter().map(|l| l * scale).collect::<Vec<_>>());
    (&(&u * &d) * &u.adjoint()).hermitian_part()
}

pub fn positive_element<R: Rng + ?Sized>(rng: &mut R, n: usize, cond_max: f64) -> PositiveElement {
    PositiveElement::new(positive(rng, n, cond_max)).expect("generated matrix is positive definite")
}

/// General invertible matrix with condition number at most `cond_max`.
pub fn with_condition<R: Rng + ?Sized>(rng: &mut R, n: usize, cond_max: f64) -> ComplexMatrix {
    let u = unitary(rng, n);
    let w = unitary(rng, n);
    let d = ComplexMatrix::diag_real(&spectrum(rng, n, cond_max));
    &(&u * &d) * &w
}

/// Orthogonal projection of the given rank onto a random subspace.
pub fn orth_projection<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> OrthProjection {
    let u = unitary(rng, n);
    let p = ComplexMatrix::from_fn(n, |i, j| (0..rank).map(|k| u[(i, k)] * u[(j, k)].conj()).sum());
    OrthProjection::from_raw(p.hermitian_part())
}

/// Random rank in `1..n` (rank 1 when `n == 1` is impossible, so 0 or 1).
pub fn proper_rank<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    if n < 2 {
        rng.random_range(0..=n)
    } else {
        rng.random_range(1..n)
    }
}

pub fn any_orth_projection<R: Rng + ?Sized>(rng: &mut R, n: usize) -> OrthProjection {
    let k = proper_rank(rng, n);
    orth_projection(rng, n, k)
}

/// Random corner `p z (1 - p)` with operator norm exactly `norm`.
pub fn corner<R: Rng + ?Sized>(rng: &mut R, p: &OrthProjection, norm: f64) -> ComplexMatrix {
    let n = p.dim();
    let z = complex(rng, n, 1.0);
    let x = p.matrix() * &z * p.complement();
    let xn = x.norm();
    if xn == 0.0 {
        x
    } else {
        x.scale(norm / xn)
    }
}

/// Oblique idempotent `p + x` with a random corner of norm uniform in
/// `[0, max_corner]`.
pub fn idempotent<R: Rng + ?Sized>(rng: &mut R, n: usize, max_corner: f64) -> Idempotent {
    let p = any_orth_projection(rng, n);
    let r = max_corner * rng.random::<f64>();
    let x = corner(rng, &p, r);
    Idempotent::from_raw(p.matrix() + &x)
}

/// Exponent and endpoint of a pair built to admit a compatible positive
/// element.
#[derive(Clone, Debug)]
pub struct CompatiblePair {
    pub p: OrthProjection,
    pub q: Idempotent,
    /// `X` with `q = e^X p e^{-X}`.
    pub exponent: ComplexMatrix,
    /// The positive element `b + c^-1` used in the construction.
    pub a: PositiveElement,
}

/// `q = e^X p e^{-X}` with `X = x - c x* b`, or `X = x + c x* b` when
/// `flip`, for random positive blocks `b` on `p` and `c` on `1 - p`. The
/// exponent is halved until `||p - q|| <= max_dist`.
pub fn compatible_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, flip: bool, max_dist: f64) -> CompatiblePair {
    assert!(n >= 2, "a proper projection needs n >= 2");
    let k = rng.random_range(1..n);
    let p = orth_projection(rng, n, k);
    let b = p.compress(&positive(rng, n, 10.0));
    let c = p.compress_complement(&positive(rng, n, 10.0));
    let x = corner(rng, &p, 1.0);
    let y = &(&c * &x.adjoint()) * &b;
    let exponent = if flip { &x + &y } else { &x - &y };
    let a = &b + &p.complement_block_inverse(&c).expect("c is invertible on 1 - p");
    let a = PositiveElement::new(a.hermitian_part()).expect("block sum is positive definite");
    let mut s = 1.0;
    loop {
        let g = exponent.scale(s);
        let e = crate::linalg::mat_exp(&g).expect("finite exponent");
        let ei = crate::linalg::mat_exp(&-g.clone()).expect("finite exponent");
        let q = &(&e * p.matrix()) * &ei;
        if (&q - p.matrix()).norm() <= max_dist {
            return CompatiblePair { p, q: Idempotent::from_raw(q), exponent: g, a };
        }
        s *= 0.5;
    }
}
