//! Idempotents, orthogonal projections and the block calculus they induce.
//!
//! A projection `p` splits every matrix into the four compressions
//! `p x p`, `p x (1-p)`, `(1-p) x p` and `(1-p) x (1-p)`. They are kept as
//! full-size matrices supported on the relevant ranges, so no basis change
//! is ever needed. The idempotents with the same range as `p` are exactly
//! `p + x` with `x` in the upper-right corner.

use crate::check::{Check, Checked};
use crate::error::{Error, Result};
use crate::linalg::{inverse, ComplexMatrix, Tolerance};

/// Matrix `q` with `q^2 = q` up to `atol * (1 + ||q||^2)`; possibly oblique.
#[derive(Clone, Debug, PartialEq)]
pub struct Idempotent {
    q: ComplexMatrix,
}

impl Idempotent {
    pub fn new(q: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(q, Tolerance::default())
    }

    pub fn with_tolerance(q: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        q.ensure_finite()?;
        let defect = (&(&q * &q) - &q).norm();
        let nq = q.norm();
        if defect > tol.atol() * (1.0 + nq * nq) {
            return Err(Error::NotIdempotent(defect));
        }
        Ok(Self { q })
    }

    /// Wraps a matrix that is idempotent by construction.
    pub(crate) fn from_raw(q: ComplexMatrix) -> Self {
        Self { q }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// `1 - q`, the idempotent onto the kernel along the range.
    pub fn complement(&self) -> Idempotent {
        Idempotent::from_raw(self.q.one_minus())
    }

    /// `||q^2 - q||`.
    pub fn defect(&self) -> f64 {
        (&(&self.q * &self.q) - &self.q).norm()
    }
}

impl From<OrthProjection> for Idempotent {
    fn from(p: OrthProjection) -> Self {
        Idempotent { q: p.p }
    }
}

/// Hermitian idempotent.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthProjection {
    p: ComplexMatrix,
    complement: ComplexMatrix,
}

impl OrthProjection {
    pub fn new(p: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(p, Tolerance::default())
    }

    pub fn with_tolerance(p: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let q = Idempotent::with_tolerance(p, tol)?;
        let h = q.q.hermitian_defect();
        if !tol.accepts(h, q.q.norm()) {
            return Err(Error::NotOrthProjection(h));
        }
        Ok(Self::from_raw(q.q))
    }

    pub(crate) fn from_raw(p: ComplexMatrix) -> Self {
        let complement = p.one_minus();
        Self { p, complement }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_raw(ComplexMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw(ComplexMatrix::identity(n))
    }

    /// Coordinate projection onto the span of the listed basis vectors.
    pub fn coordinate(n: usize, support: &[usize]) -> Self {
        let mut d = vec![0.0; n];
        for &i in support {
            d[i] = 1.0;
        }
        Self::from_raw(ComplexMatrix::diag_real(&d))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.p
    }

    /// `1 - p`.
    pub fn complement(&self) -> &ComplexMatrix {
        &self.complement
    }

    pub fn complement_projection(&self) -> OrthProjection {
        OrthProjection::from_raw(self.complement.clone())
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        self.p.trace().re.round().max(0.0) as usize
    }

    /// `2p - 1`.
    pub fn symmetry(&self) -> ComplexMatrix {
        &self.p - &self.complement
    }

    /// `p x p`.
    pub fn compress(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.p * x * &self.p
    }

    /// `(1-p) x (1-p)`.
    pub fn compress_complement(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.complement * x * &self.complement
    }

    /// `p x (1-p)`.
    pub fn upper_corner(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.p * x * &self.complement
    }

    /// `(1-p) x p`.
    pub fn lower_corner(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.complement * x * &self.p
    }

    /// Inverse of `p x p` on the range of `p` (zero on the kernel), computed
    /// as `(p x p + (1-p))^-1 p`.
    pub fn block_inverse(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let m = &self.compress(x) + &self.complement;
        Ok(&inverse(&m)? * &self.p)
    }

    /// Inverse of `(1-p) x (1-p)` on the range of `1-p`.
    pub fn complement_block_inverse(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let m = &self.compress_complement(x) + &self.p;
        Ok(&inverse(&m)? * &self.complement)
    }
}

/// The four compressions of a matrix relative to an orthogonal projection.
#[derive(Clone, Debug)]
pub struct BlockView {
    pub p: OrthProjection,
    pub x11: ComplexMatrix,
    pub x12: ComplexMatrix,
    pub x21: ComplexMatrix,
    pub x22: ComplexMatrix,
}

impl BlockView {
    pub fn reassemble(&self) -> ComplexMatrix {
        &(&self.x11 + &self.x12) + &(&self.x21 + &self.x22)
    }
}

pub fn blocks(x: &ComplexMatrix, p: &OrthProjection) -> Result<BlockView> {
    x.ensure_same_dim(p.matrix())?;
    Ok(BlockView {
        p: p.clone(),
        x11: p.compress(x),
        x12: p.upper_corner(x),
        x21: p.lower_corner(x),
        x22: p.compress_complement(x),
    })
}

/// Conditional expectation `p x p + (1-p) x (1-p)` onto the commutant of `p`.
pub fn cond_expectation(x: &ComplexMatrix, p: &OrthProjection) -> Result<ComplexMatrix> {
    x.ensure_same_dim(p.matrix())?;
    Ok(&p.compress(x) + &p.compress_complement(x))
}

/// [`cond_expectation`] with its defining properties checked: the result
/// commutes with `p`, the map is idempotent and contractive in operator norm.
pub fn cond_expectation_checked(x: &ComplexMatrix, p: &OrthProjection) -> Result<Checked<ComplexMatrix>> {
    let e = cond_expectation(x, p)?;
    let tol = Tolerance::default();
    let xn = x.norm();
    let checks = vec![
        Check::at_most("commutes_with_p", p.matrix().commutator(&e).norm(), tol.bound(xn)),
        Check::at_most("idempotent", (&cond_expectation(&e, p)? - &e).norm(), tol.bound(xn)),
        Check::at_most("contractive", e.norm(), xn + tol.bound(xn)),
    ];
    Ok(Checked::new(e, checks))
}

/// Orthogonal projection onto the range of `q`:
/// `q q* (1 - (q - q*)^2)^-1`.
pub fn orth_from_idempotent(q: &Idempotent) -> Result<OrthProjection> {
    let q = q.matrix();
    let qs = q.adjoint();
    let d = q - &qs;
    let m = ComplexMatrix::identity(q.dim()) - &d * &d;
    Ok(OrthProjection::from_raw(&(q * &qs) * &inverse(&m)?))
}

/// Kerzman-Stein form of the same projection: `q (1 + q - q*)^-1`.
pub fn kerzman_stein(q: &Idempotent) -> Result<OrthProjection> {
    let q = q.matrix();
    let m = &(&ComplexMatrix::identity(q.dim()) + q) - &q.adjoint();
    Ok(OrthProjection::from_raw(q * &inverse(&m)?))
}

/// `q p = p` and `p q = q`: same range as `p`.
pub fn in_qp(q: &Idempotent, p: &OrthProjection, tol: Tolerance) -> bool {
    if q.dim() != p.dim() {
        return false;
    }
    let qm = q.matrix();
    let pm = p.matrix();
    let scale = qm.norm();
    tol.accepts((&(qm * pm) - pm).norm(), scale) && tol.accepts((&(pm * qm) - qm).norm(), scale)
}

/// Affine coordinate `q - p` of an idempotent with the range of `p`.
pub fn qp_coordinates(q: &Idempotent, p: &OrthProjection) -> Result<ComplexMatrix> {
    q.matrix().ensure_same_dim(p.matrix())?;
    if !in_qp(q, p, Tolerance::default()) {
        return Err(Error::NotInQp);
    }
    Ok(q.matrix() - p.matrix())
}

/// Orthogonal projection onto `ker q`, i.e. onto the range of `1 - q`.
pub fn kernel_projection(q: &Idempotent) -> Result<OrthProjection> {
    orth_from_idempotent(&q.complement())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::linalg::is_positive_definite;
    use crate::sample;

    fn err(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).norm()
    }

    fn coord() -> OrthProjection {
        OrthProjection::coordinate(2, &[0])
    }

    #[test]
    fn validation() {
        let q = ComplexMatrix::real(&[1.0, 3.0, 0.0, 0.0]);
        assert!(Idempotent::new(q.clone()).is_ok());
        assert!(matches!(OrthProjection::new(q), Err(Error::NotOrthProjection(_))));
        let not_idem = ComplexMatrix::real(&[1.0, 0.0, 0.0, 0.5]);
        assert!(matches!(Idempotent::new(not_idem), Err(Error::NotIdempotent(_))));
        assert!(OrthProjection::new(ComplexMatrix::diag_real(&[0.0, 1.0])).is_ok());
    }

    #[test]
    fn blocks_examples() {
        let mut rng = sample::rng(1);
        let p = sample::orth_projection(&mut rng, 4, 2);
        let b = blocks(p.matrix(), &p).unwrap();
        assert!(err(&b.x11, p.matrix()) < 1e-14);
        assert!(b.x12.norm() < 1e-14 && b.x21.norm() < 1e-14 && b.x22.norm() < 1e-14);

        let b = blocks(&ComplexMatrix::identity(4), &p).unwrap();
        assert!(err(&b.x11, p.matrix()) < 1e-14);
        assert!(err(&b.x22, p.complement()) < 1e-14);
        assert!(b.x12.norm() < 1e-14 && b.x21.norm() < 1e-14);

        let x = ComplexMatrix::real(&[1.0, 2.0, 3.0, 4.0]);
        let b = blocks(&x, &coord()).unwrap();
        assert_eq!(b.x11, ComplexMatrix::real(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(b.x12, ComplexMatrix::real(&[0.0, 2.0, 0.0, 0.0]));
        assert_eq!(b.x21, ComplexMatrix::real(&[0.0, 0.0, 3.0, 0.0]));
        assert_eq!(b.x22, ComplexMatrix::real(&[0.0, 0.0, 0.0, 4.0]));
    }

    #[test]
    fn blocks_respect_involution_and_support() {
        let mut rng = sample::rng(2);
        for n in [2, 3, 5] {
            let p = sample::any_orth_projection(&mut rng, n);
            let x = sample::complex(&mut rng, n, 2.0);
            let b = blocks(&x, &p).unwrap();
            let bs = blocks(&x.adjoint(), &p).unwrap();
            assert!(err(&bs.x12, &b.x21.adjoint()) < 1e-13);
            assert!(err(&b.reassemble(), &x) < 1e-12);
            assert!(err(&p.compress(&b.x11), &b.x11) < 1e-12);
            assert!(err(&p.upper_corner(&b.x12), &b.x12) < 1e-12);
            assert!(err(&p.lower_corner(&b.x21), &b.x21) < 1e-12);
            assert!(err(&p.compress_complement(&b.x22), &b.x22) < 1e-12);
        }
    }

    #[test]
    fn cond_expectation_examples() {
        let x = ComplexMatrix::real(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            cond_expectation(&x, &coord()).unwrap(),
            ComplexMatrix::diag_real(&[1.0, 4.0])
        );
        let d = ComplexMatrix::diag_real(&[7.0, -2.0]);
        assert_eq!(cond_expectation(&d, &coord()).unwrap(), d);
        assert!(matches!(
            cond_expectation(&ComplexMatrix::identity(3), &coord()),
            Err(Error::DimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn cond_expectation_keeps_positivity() {
        let mut rng = sample::rng(3);
        for n in [2, 3, 4, 8] {
            let p = sample::any_orth_projection(&mut rng, n);
            let a = sample::positive(&mut rng, n, 1e3);
            assert!(is_positive_definite(&cond_expectation(&a, &p).unwrap()));
        }
    }

    #[test]
    fn orth_from_idempotent_examples() {
        let p = coord();
        let r = orth_from_idempotent(&Idempotent::from(p.clone())).unwrap();
        assert!(err(r.matrix(), p.matrix()) < 1e-15);

        // q = [[1,t],[0,0]] has range span{e1}
        let t = 0.8;
        let q = Idempotent::new(ComplexMatrix::real(&[1.0, t, 0.0, 0.0])).unwrap();
        for r in [orth_from_idempotent(&q).unwrap(), kerzman_stein(&q).unwrap()] {
            let rm = r.matrix();
            assert!(err(rm, &rm.adjoint()) < 1e-14);
            assert!(err(&(rm * rm), rm) < 1e-14);
            assert!(err(&(rm * q.matrix()), q.matrix()) < 1e-14);
            assert!(err(&(q.matrix() * rm), rm) < 1e-14);
            assert!(err(rm, p.matrix()) < 1e-14);
        }

        let z = Idempotent::new(ComplexMatrix::zeros(3)).unwrap();
        assert!(orth_from_idempotent(&z).unwrap().matrix().norm() < 1e-15);
        assert!(kerzman_stein(&z).unwrap().matrix().norm() < 1e-15);
    }

    #[test]
    fn formulas_agree_on_seeded_batch() {
        let mut rng = sample::rng(5);
        for _ in 0..500 {
            let n = rng_n(&mut rng);
            let q = sample::idempotent(&mut rng, n, 6.0);
            let a = orth_from_idempotent(&q).unwrap();
            let b = kerzman_stein(&q).unwrap();
            assert!(err(a.matrix(), b.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn kernel_range_coordinates() {
        // q = [[1,t],[0,0]] with t: kernel spanned by (-t, 1)
        let t = 0.5;
        let q = Idempotent::new(ComplexMatrix::real(&[1.0, t, 0.0, 0.0])).unwrap();
        let k = kernel_projection(&q).unwrap();
        let s = 1.0 + t * t;
        let expected = ComplexMatrix::real(&[t * t / s, -t / s, -t / s, 1.0 / s]);
        assert!(err(k.matrix(), &expected) < 1e-14);

        let p = coord();
        let k = kernel_projection(&Idempotent::from(p.clone())).unwrap();
        assert!(err(k.matrix(), p.complement()) < 1e-15);
        let k = kernel_projection(&Idempotent::new(ComplexMatrix::identity(2)).unwrap()).unwrap();
        assert!(k.matrix().norm() < 1e-15);

        let x = qp_coordinates(&q, &p).unwrap();
        assert_eq!(x, ComplexMatrix::real(&[0.0, t, 0.0, 0.0]));
        assert!(qp_coordinates(&Idempotent::from(p.clone()), &p).unwrap().is_zero());
        let other = Idempotent::from(p.complement_projection());
        assert_eq!(qp_coordinates(&other, &p).unwrap_err(), Error::NotInQp);
    }

    #[test]
    fn qp_membership() {
        let tol = Tolerance::default();
        let mut rng = sample::rng(4);
        for _ in 0..100 {
            let n = rng_n(&mut rng);
            let p = sample::any_orth_projection(&mut rng, n);
            assert!(in_qp(&Idempotent::from(p.clone()), &p, tol));
            let x = sample::corner(&mut rng, &p, 3.0);
            let q = Idempotent::new(p.matrix() + &x).unwrap();
            assert!(in_qp(&q, &p, tol));
            let back = qp_coordinates(&q, &p).unwrap();
            assert!(err(&(p.matrix() + &back), q.matrix()) < 1e-14);
            assert!(err(&p.upper_corner(&back), &back) < 1e-12);
            if p.rank() > 0 && p.rank() < n {
                assert!(!in_qp(&Idempotent::from(p.complement_projection()), &p, tol));
            }
        }
    }

    fn rng_n(rng: &mut sample::ChaCha8Rng) -> usize {
        use rand::Rng;
        rng.random_range(2..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn expectation_properties(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = sample::rng(seed);
            let p = sample::any_orth_projection(&mut rng, n);
            let x = sample::complex(&mut rng, n, 2.0);
            let e = |m: &ComplexMatrix| cond_expectation(m, &p).unwrap();

            // module map for elements commuting with p
            let b = e(&sample::complex(&mut rng, n, 1.0));
            let c = e(&sample::complex(&mut rng, n, 1.0));
            prop_assert!(err(&e(&(&b * &x * &c)), &(&b * &e(&x) * &c)) < 1e-10);
            prop_assert!(err(&e(&x.adjoint()), &e(&x).adjoint()) < 1e-12);
            prop_assert!(e(&x).norm() <= x.norm() + 1e-12);

            // monotone on Hermitian pairs b <= x
            let h = sample::hermitian(&mut rng, n, 1.0);
            let g = sample::complex(&mut rng, n, 1.0);
            let above = &h + &(&g.adjoint() * &g);
            let gap = crate::linalg::herm_eig(&e(&(&above - &h))).unwrap().min();
            prop_assert!(gap >= -1e-10);

            // 2 E(a) >= a for a >= 0
            let a = &g.adjoint() * &g;
            let d = &e(&a).scale(2.0) - &a;
            prop_assert!(crate::linalg::herm_eig(&d).unwrap().min() >= -1e-10);
        }

        #[test]
        fn same_range_characterization(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = sample::rng(seed);
            let p = sample::any_orth_projection(&mut rng, n);
            let q = Idempotent::new(p.matrix() + &sample::corner(&mut rng, &p, 2.0)).unwrap();
            let r = Idempotent::new(p.matrix() + &sample::corner(&mut rng, &p, 2.0)).unwrap();
            let same_proj = err(orth_from_idempotent(&q).unwrap().matrix(), orth_from_idempotent(&r).unwrap().matrix()) < 1e-9;
            let algebraic = err(&(q.matrix() * r.matrix()), r.matrix()) < 1e-9 && err(&(r.matrix() * q.matrix()), q.matrix()) < 1e-9;
            prop_assert!(same_proj && algebraic);

            // a different range breaks both sides
            let other = sample::any_orth_projection(&mut rng, n);
            let s = Idempotent::new(other.matrix() + &sample::corner(&mut rng, &other, 1.0)).unwrap();
            let same_proj = err(orth_from_idempotent(&q).unwrap().matrix(), orth_from_idempotent(&s).unwrap().matrix()) < 1e-9;
            let algebraic = err(&(q.matrix() * s.matrix()), s.matrix()) < 1e-9 && err(&(s.matrix() * q.matrix()), q.matrix()) < 1e-9;
            prop_assert_eq!(same_proj, algebraic);
        }

        #[test]
        fn two_formulas_agree(seed in any::<u64>(), n in 2usize..8) {
            let mut rng = sample::rng(seed);
            let q = sample::idempotent(&mut rng, n, 9.0);
            let a = orth_from_idempotent(&q).unwrap();
            let b = kerzman_stein(&q).unwrap();
            prop_assert!(err(a.matrix(), b.matrix()) <= 1e-9);
            prop_assert!(OrthProjection::new(a.matrix().clone()).is_ok());
        }
    }
}
