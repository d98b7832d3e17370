//! The map sending a projection `p` and a positive element `a` to the unique
//! `a`-selfadjoint idempotent with the range of `p`.
//!
//! In block form relative to `p` the result is `p + a1^-1 a2`, where `a1` and
//! `a2` are the upper blocks of `a`. Besides the closed forms this module has
//! the two power series around a base point, the tangent maps, the fiber
//! predicate and the global cross section `q -> (range of q, |2q - 1|)`.

use crate::check::{Check, Checked};
use crate::error::{Error, Result};
use crate::involution::{a_adjoint, PositiveElement};
use crate::linalg::{herm_eig, herm_sqrt, inverse, mat_exp, ComplexMatrix, Tolerance};
use crate::projection::{cond_expectation, orth_from_idempotent, Idempotent, OrthProjection};

/// A point `(p, a)` of the domain of the fibration.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    pub p: OrthProjection,
    pub a: PositiveElement,
}

impl FiberPoint {
    pub fn new(p: OrthProjection, a: PositiveElement) -> Result<Self> {
        p.matrix().ensure_same_dim(a.matrix())?;
        Ok(Self { p, a })
    }

    /// The idempotent this point maps to.
    pub fn image(&self) -> Result<Idempotent> {
        phi(&self.p, &self.a)
    }
}

/// Truncation rule for the power series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub term_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, term_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::NoConvergence(0));
        }
        if !(term_tol > 0.0 && term_tol.is_finite()) {
            return Err(Error::InvalidTolerance(term_tol));
        }
        Ok(Self { max_terms, term_tol })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { max_terms: 200, term_tol: 1e-15 }
    }
}

/// A truncated series together with its bookkeeping.
#[derive(Clone, Debug)]
pub struct SeriesSum {
    pub value: Idempotent,
    /// Number of terms summed.
    pub terms: usize,
    /// Norm of the last term added.
    pub last_term: f64,
    /// Geometric bound `r^N` with `r` the ratio bound and `N` the term count.
    pub a_priori_bound: f64,
}

fn ensure_dims(p: &OrthProjection, a: &PositiveElement) -> Result<()> {
    p.matrix().ensure_same_dim(a.matrix())
}

/// `p E_p(a)^-1 a`.
pub fn phi(p: &OrthProjection, a: &PositiveElement) -> Result<Idempotent> {
    ensure_dims(p, a)?;
    let e = cond_expectation(a.matrix(), p)?;
    let q = &(p.matrix() * &inverse(&e)?) * a.matrix();
    Ok(Idempotent::from_raw(q))
}

const PHI_TOL: f64 = 1e-9;
const FORM_TOL: f64 = 1e-8;

/// [`phi`] with its characterization checked: `q` idempotent, `qp = p`,
/// `pq = q`, `aq = q* a`, the norm bound `2 ||a|| ||a^-1||`, and agreement
/// with the block and alternative closed forms.
pub fn phi_checked(p: &OrthProjection, a: &PositiveElement) -> Result<Checked<Idempotent>> {
    let q = phi(p, a)?;
    let (qm, pm, am) = (q.matrix(), p.matrix(), a.matrix());
    let scale = 1.0 + qm.norm() * am.norm();
    let form_scale = 1.0 + qm.norm();
    let checks = vec![
        Check::at_most("idempotent", (&(qm * qm) - qm).norm(), PHI_TOL * scale),
        Check::at_most("fixes_p", (&(qm * pm) - pm).norm(), PHI_TOL * scale),
        Check::at_most("range_in_p", (&(pm * qm) - qm).norm(), PHI_TOL * scale),
        Check::at_most("a_selfadjoint", (&(am * qm) - &(&qm.adjoint() * am)).norm(), PHI_TOL * scale),
        Check::at_most("norm_bound", qm.norm(), 2.0 * am.norm() * a.inv().norm() + PHI_TOL),
        Check::at_most("block_form", (phi_block(p, a)?.matrix() - qm).norm(), FORM_TOL * form_scale),
        Check::at_most("alt_form", (phi_alt(p, a)?.matrix() - qm).norm(), FORM_TOL * form_scale),
    ];
    Ok(Checked::new(q, checks))
}

/// `p + a1^-1 a2`, with the inverse taken on the range of `p`.
pub fn phi_block(p: &OrthProjection, a: &PositiveElement) -> Result<Idempotent> {
    ensure_dims(p, a)?;
    let a1_inv = p.block_inverse(a.matrix())?;
    let a2 = p.upper_corner(a.matrix());
    Ok(Idempotent::from_raw(p.matrix() + &(&a1_inv * &a2)))
}

/// `p (1 + p - a^-1 p a)^-1`.
pub fn phi_alt(p: &OrthProjection, a: &PositiveElement) -> Result<Idempotent> {
    ensure_dims(p, a)?;
    let pm = p.matrix();
    let m = &(&ComplexMatrix::identity(p.dim()) + pm) - &(&(a.inv() * pm) * a.matrix());
    Ok(Idempotent::from_raw(pm * &inverse(&m)?))
}

fn ensure_hermitian(h: &ComplexMatrix) -> Result<()> {
    h.ensure_finite()?;
    let d = h.hermitian_defect();
    if !Tolerance::default().accepts(d, h.norm()) {
        return Err(Error::NotHermitian(d));
    }
    Ok(())
}

/// Sums `base + sum_{n>=1} (-1)^(n-1) (base k)^n (1 - base)`.
fn alternating_series(base: &ComplexMatrix, k: &ComplexMatrix, ratio: f64, ctl: SeriesControl) -> Result<SeriesSum> {
    let n = base.dim();
    let left = base * k;
    let right = ComplexMatrix::identity(n) - base;
    let mut power = left.clone();
    let mut sum = base.clone();
    for terms in 1..=ctl.max_terms {
        let term = &power * &right;
        let tn = term.norm();
        if terms % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if tn < ctl.term_tol {
            return Ok(SeriesSum {
                value: Idempotent::from_raw(sum),
                terms,
                last_term: tn,
                a_priori_bound: ratio.powi(terms as i32),
            });
        }
        power = &power * &left;
    }
    Err(Error::NoConvergence(ctl.max_terms))
}

/// Power series for the image of `1 + h` around the identity.
pub fn phi_series_at_identity(p: &OrthProjection, h: &ComplexMatrix, ctl: SeriesControl) -> Result<SeriesSum> {
    h.ensure_same_dim(p.matrix())?;
    ensure_hermitian(h)?;
    let r = h.norm();
    if r >= 1.0 {
        return Err(Error::HTooLarge(r));
    }
    alternating_series(p.matrix(), h, r, ctl)
}

/// Power series for the image of `a + h` around `phi(p, a)`, in powers of
/// `a^-1 h`. Requires `||h|| < 1 / ||a^-1||`.
pub fn phi_series_at(p: &OrthProjection, a: &PositiveElement, h: &ComplexMatrix, ctl: SeriesControl) -> Result<SeriesSum> {
    ensure_dims(p, a)?;
    h.ensure_same_dim(p.matrix())?;
    ensure_hermitian(h)?;
    let r = h.norm() * a.inv().norm();
    if r >= 1.0 {
        return Err(Error::HTooLarge(h.norm()));
    }
    let q0 = phi(p, a)?;
    alternating_series(q0.matrix(), &(a.inv() * h), r, ctl)
}

/// Derivative at `a = 1` in the Hermitian direction `x`: `p x (1 - p)`.
pub fn tangent_phi_p_at_identity(p: &OrthProjection, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.ensure_same_dim(p.matrix())?;
    ensure_hermitian(x)?;
    Ok(p.upper_corner(x))
}

/// `exp(-p E_p(a)^-1 a (1 - p))`, which conjugates `p` onto `phi(p, a)`.
pub fn conjugator_u(p: &OrthProjection, a: &PositiveElement) -> Result<ComplexMatrix> {
    ensure_dims(p, a)?;
    let e = cond_expectation(a.matrix(), p)?;
    let x = &(&(p.matrix() * &inverse(&e)?) * a.matrix()) * p.complement();
    mat_exp(&-x)
}

fn min_eig_on(m: &ComplexMatrix, support: &ComplexMatrix, pad: &ComplexMatrix) -> Result<f64> {
    let compressed = &(support * m) * support;
    Ok(herm_eig(&(&compressed.hermitian_part() + pad))?.min())
}

/// Whether `phi(p, a) = q`: `p` is the range projection of `q`, the upper
/// right block of `a` equals `a1 (q - p)`, and the block inequalities
/// `a1 > 0`, `x* a1 x < a3` hold.
pub fn fiber_contains(q: &Idempotent, p: &OrthProjection, a: &PositiveElement, tol: Tolerance) -> bool {
    if q.dim() != p.dim() || p.dim() != a.dim() {
        return false;
    }
    let Ok(range) = orth_from_idempotent(q) else {
        return false;
    };
    if !tol.accepts((range.matrix() - p.matrix()).norm(), 1.0) {
        return false;
    }
    let x = q.matrix() - p.matrix();
    let am = a.matrix();
    let a1 = p.compress(am);
    let a2 = p.upper_corner(am);
    let a3 = p.compress_complement(am);
    if !tol.accepts((&a2 - &(&a1 * &x)).norm(), am.norm() * (1.0 + x.norm())) {
        return false;
    }
    let floor = tol.atol() * am.norm();
    let upper = min_eig_on(&a1, p.matrix(), p.complement());
    let schur = &a3 - &(&(&x.adjoint() * &a1) * &x);
    let lower = min_eig_on(&schur, p.complement(), p.matrix());
    matches!((upper, lower), (Ok(u), Ok(l)) if u > floor && l > floor)
}

/// `(range projection of q, |2q - 1|)`, a point whose image is `q`.
pub fn cross_section(q: &Idempotent) -> Result<FiberPoint> {
    let p = orth_from_idempotent(q)?;
    let e = q.matrix().scale(2.0) - ComplexMatrix::identity(q.dim());
    let lambda = herm_sqrt(&(&e.adjoint() * &e))?;
    Ok(FiberPoint { p, a: PositiveElement::new(lambda)? })
}

/// [`cross_section`] with the section property checked.
pub fn cross_section_checked(q: &Idempotent) -> Result<Checked<FiberPoint>> {
    let point = cross_section(q)?;
    let image = point.image()?;
    let qm = q.matrix();
    let checks = vec![
        Check::at_most("image_is_q", (image.matrix() - qm).norm(), PHI_TOL * (1.0 + qm.norm())),
        Check::holds("fiber_contains", fiber_contains(q, &point.p, &point.a, Tolerance::default())),
    ];
    Ok(Checked::new(point, checks))
}

/// Tangent of `p -> phi(p, a)` at `p` in the direction `x`.
#[derive(Clone, Debug)]
pub struct PhiTangent {
    /// Upper right block `a1^-1 x12 (a3 - a2* a1^-1 a2)`.
    pub corner: ComplexMatrix,
    /// Full tangent vector `corner + corner^#a`.
    pub full: ComplexMatrix,
}

/// Checks that `x` is a Hermitian matrix with vanishing diagonal blocks.
pub fn ensure_p_tangent(p: &OrthProjection, x: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    x.ensure_same_dim(p.matrix())?;
    x.ensure_finite()?;
    let scale = x.norm();
    let diag = p.compress(x).norm().max(p.compress_complement(x).norm());
    if !tol.accepts(diag, scale) || !tol.accepts(x.hermitian_defect(), scale) {
        return Err(Error::NotTangent);
    }
    Ok(())
}

pub fn tangent_phi_a(p: &OrthProjection, a: &PositiveElement, x: &ComplexMatrix) -> Result<PhiTangent> {
    ensure_dims(p, a)?;
    ensure_p_tangent(p, x, Tolerance::default())?;
    let am = a.matrix();
    let a1_inv = p.block_inverse(am)?;
    let a2 = p.upper_corner(am);
    let a3 = p.compress_complement(am);
    let schur = &a3 - &(&(&a2.adjoint() * &a1_inv) * &a2);
    let corner = &(&a1_inv * &p.upper_corner(x)) * &schur;
    let full = &corner + &a_adjoint(&corner, a)?;
    Ok(PhiTangent { corner, full })
}

/// `1 - phi(1 - p, a)`: the `a`-selfadjoint idempotent with kernel `ker p`.
pub fn phi_same_kernel(p: &OrthProjection, a: &PositiveElement) -> Result<Idempotent> {
    let q = phi(&p.complement_projection(), a)?;
    Ok(q.complement())
}
