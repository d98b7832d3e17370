//! Polar retraction of idempotents onto orthogonal projections.
//!
//! Idempotents are identified with symmetries through `q -> 2q - 1`. A
//! symmetry `e` has polar form `e = rho |e|` with `rho` a Hermitian unitary,
//! and `rho = |e| e`. The retraction sends `q` to `(rho + 1) / 2`. Restricted
//! to the idempotents that are selfadjoint for `#a` it is a bijection onto
//! the orthogonal projections with an explicit inverse.

use crate::check::{Check, Checked};
use crate::error::{Error, Result};
use crate::fibration::phi;
use crate::involution::{is_a_selfadjoint, PositiveElement};
use crate::linalg::{herm_eig, herm_sqrt, inverse, ComplexMatrix, Tolerance};
use crate::projection::{kernel_projection, orth_from_idempotent, Idempotent, OrthProjection};

const POST_TOL: f64 = 1e-9;
const ROUND_TRIP_TOL: f64 = 1e-8;

/// `e` with `e^2 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Symmetry {
    e: ComplexMatrix,
}

impl Symmetry {
    pub fn new(e: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(e, Tolerance::default())
    }

    pub fn with_tolerance(e: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        e.ensure_finite()?;
        let defect = (&(&e * &e) - &ComplexMatrix::identity(e.dim())).norm();
        let ne = e.norm();
        if defect > tol.atol() * (1.0 + ne * ne) {
            return Err(Error::NotSymmetry(defect));
        }
        Ok(Self { e })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.e
    }
}

/// `2q - 1`.
pub fn to_symmetry(q: &Idempotent) -> Symmetry {
    let e = q.matrix().scale(2.0) - ComplexMatrix::identity(q.dim());
    Symmetry { e }
}

/// `(e + 1) / 2`.
pub fn from_symmetry(e: &Symmetry) -> Idempotent {
    let q = (&e.e + &ComplexMatrix::identity(e.e.dim())).scale(0.5);
    Idempotent::from_raw(q)
}

fn identity_like(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(m.dim())
}

/// `(rho + 1) / 2`, with `rho = |e| e` and `e = 2q - 1`.
pub fn omega(q: &Idempotent) -> Result<OrthProjection> {
    omega_checked(q)?.into_result()
}

/// [`omega`] with its postconditions: `rho` Hermitian and an involution,
/// `e = rho |e|`, and `|e*| = |e|^-1`.
pub fn omega_checked(q: &Idempotent) -> Result<Checked<OrthProjection>> {
    q.matrix().ensure_finite()?;
    let e = to_symmetry(q).e;
    let id = identity_like(&e);
    let lambda = herm_sqrt(&(&e.adjoint() * &e))?;
    let rho = &lambda * &e;
    let scale = 1.0 + e.norm();
    let lambda_star = herm_sqrt(&(&e * &e.adjoint()))?;
    let checks = vec![
        Check::at_most("rho_hermitian", rho.hermitian_defect(), POST_TOL * scale),
        Check::at_most("rho_involution", (&(&rho * &rho) - &id).norm(), POST_TOL * scale),
        Check::at_most("polar_consistency", (&(&rho * &lambda) - &e).norm(), POST_TOL * scale * scale),
        Check::at_most("abs_adjoint_inverse", (&lambda_star - &inverse(&lambda)?).norm(), POST_TOL * scale * scale),
    ];
    let r = OrthProjection::from_raw((&rho + &id).scale(0.5));
    Ok(Checked::new(r, checks))
}

/// The retraction restricted to `a`-selfadjoint idempotents.
pub fn omega_a(q: &Idempotent, a: &PositiveElement) -> Result<OrthProjection> {
    q.matrix().ensure_same_dim(a.matrix())?;
    if !is_a_selfadjoint(q.matrix(), a, Tolerance::default()) {
        return Err(Error::NotASelfadjoint);
    }
    omega(q)
}

/// The unique `a`-selfadjoint idempotent retracting onto `r`:
/// `b^-1 sign(b rho b) b` mapped back to an idempotent, where `b = a^{1/2}`
/// and `rho = 2r - 1`.
pub fn omega_a_inverse(r: &OrthProjection, a: &PositiveElement) -> Result<Idempotent> {
    omega_a_inverse_checked(r, a)?.into_result()
}

pub fn omega_a_inverse_checked(r: &OrthProjection, a: &PositiveElement) -> Result<Checked<Idempotent>> {
    r.matrix().ensure_same_dim(a.matrix())?;
    let rho = r.symmetry();
    let b = a.half();
    let m = &(b * &rho) * b;
    let eig = herm_eig(&m.hermitian_part())?;
    let floor = f64::EPSILON * eig.max().abs().max(eig.min().abs());
    if eig.values.iter().any(|l| l.abs() <= floor) {
        return Err(Error::Singular);
    }
    let w = eig.map(f64::signum);
    let e = &(a.half_inv() * &w) * b;
    let q = from_symmetry(&Symmetry { e });
    let selfadjoint = is_a_selfadjoint(q.matrix(), a, Tolerance::new(ROUND_TRIP_TOL)?);
    let back = omega(&q)?;
    let checks = vec![
        Check::holds("a_selfadjoint", selfadjoint),
        Check::at_most("retracts_to_r", (back.matrix() - r.matrix()).norm(), ROUND_TRIP_TOL),
    ];
    Ok(Checked::new(q, checks))
}

/// `D^{-1/2} M` in the block coordinates of `p`, where `x = phi(p, a) - p`,
/// `D = 1 + x x* + x* x` and `M = 2p - 1 + x + x*`.
fn move_block_form(p: &OrthProjection, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = identity_like(x);
    let xs = x.adjoint();
    let d = &(&id + &(x * &xs)) + &(&xs * x);
    let m = &(&p.symmetry() + x) + &xs;
    let d_half_inv = herm_eig(&d.hermitian_part())?.map(|l| 1.0 / l.sqrt());
    Ok(&d_half_inv * &m)
}

/// `[q q* + (1 - q)* (1 - q)]^{-1/2} (q + q* - 1)`.
fn move_invariant_form(q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = identity_like(q);
    let qs = q.adjoint();
    let c = &id - q;
    let g = &(q * &qs) + &(&c.adjoint() * &c);
    let g_half_inv = herm_eig(&g.hermitian_part())?.map(|l| 1.0 / l.sqrt());
    Ok(&g_half_inv * &buckholtz_factor(q))
}

fn buckholtz_factor(q: &ComplexMatrix) -> ComplexMatrix {
    &(q + &q.adjoint()) - &identity_like(q)
}

/// Retraction of `phi(p, a)`, evaluated by the closed block formula.
pub fn omega_phi_move(p: &OrthProjection, a: &PositiveElement) -> Result<OrthProjection> {
    omega_phi_move_checked(p, a)?.into_result()
}

/// [`omega_phi_move`] with both closed forms cross-checked against each
/// other and against the composite of the retraction with `phi`.
pub fn omega_phi_move_checked(p: &OrthProjection, a: &PositiveElement) -> Result<Checked<OrthProjection>> {
    let q = phi(p, a)?;
    let x = q.matrix() - p.matrix();
    let block = move_block_form(p, &x)?;
    let invariant = move_invariant_form(q.matrix())?;
    let id = identity_like(&x);
    let r = OrthProjection::from_raw((&block + &id).scale(0.5));
    let composite = omega(&q)?;
    let checks = vec![
        Check::at_most("forms_agree", (&block - &invariant).norm(), POST_TOL),
        Check::at_most("equals_retraction", (r.matrix() - composite.matrix()).norm(), POST_TOL),
    ];
    Ok(Checked::new(r, checks))
}

/// `|2 phi(p, a) - 1|` from the block formula
/// `diag(1 + x x*, 1 + x* x)^{-1/2} [[1, x], [x*, 2 x* x + 1]]`.
pub fn abs_symmetry_blocks(p: &OrthProjection, a: &PositiveElement) -> Result<ComplexMatrix> {
    abs_symmetry_blocks_checked(p, a)?.into_result()
}

pub fn abs_symmetry_blocks_checked(p: &OrthProjection, a: &PositiveElement) -> Result<Checked<ComplexMatrix>> {
    let q = phi(p, a)?;
    let x = q.matrix() - p.matrix();
    let xs = x.adjoint();
    let id = identity_like(&x);
    let d = &(&id + &(&x * &xs)) + &(&xs * &x);
    let d_half_inv = herm_eig(&d.hermitian_part())?.map(|l| 1.0 / l.sqrt());
    let m = &(&(&id + &x) + &xs) + &(&xs * &x).scale(2.0);
    let abs = &d_half_inv * &m;
    let e = to_symmetry(&q).e;
    let oracle = herm_sqrt(&(&e.adjoint() * &e))?;
    let check = Check::at_most("matches_sqrt", (&abs - &oracle).norm(), POST_TOL * (1.0 + oracle.norm()));
    Ok(Checked::new(abs, vec![check]))
}

/// `q + q* - 1`, the inverse of `P_range(q) - P_ker(q)`.
pub fn buckholtz_inverse(q: &Idempotent) -> Result<ComplexMatrix> {
    let (b, check) = buckholtz_checked(q)?;
    if !check.pass {
        return Err(Error::Singular);
    }
    Ok(b)
}

pub fn buckholtz_checked(q: &Idempotent) -> Result<(ComplexMatrix, Check)> {
    let b = buckholtz_factor(q.matrix());
    let diff = orth_from_idempotent(q)?.matrix() - kernel_projection(q)?.matrix();
    let defect = (&(&b * &diff) - &identity_like(&b)).norm();
    Ok((b, Check::at_most("inverse_identity", defect, ROUND_TRIP_TOL)))
}

/// Radius of the orbit of `p` under all moves `omega_phi_move(p, .)`.
pub const ORBIT_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Whether `||r - p|| < sqrt(2)/2 - atol`. Membership only; no positive
/// element realizing the move is constructed.
pub fn orbit_contains(p: &OrthProjection, r: &OrthProjection) -> bool {
    orbit_check(p, r, Tolerance::default()).pass
}

pub fn orbit_check(p: &OrthProjection, r: &OrthProjection, tol: Tolerance) -> Check {
    if p.dim() != r.dim() {
        return Check::below("norm_lt_sqrt2_over_2", f64::INFINITY, ORBIT_RADIUS - tol.atol());
    }
    Check::below("norm_lt_sqrt2_over_2", (r.matrix() - p.matrix()).norm(), ORBIT_RADIUS - tol.atol())
}
