//! Geodesics of idempotents and orthogonal projections.
//!
//! A tangent vector at `p` is a matrix with vanishing diagonal blocks. The
//! geodesic through `p` with velocity `v` is `t -> e^{t v'} p e^{-t v'}`
//! with `v' = [v, p] = v p - p v`. On off-diagonal matrices the map
//! `v -> [v, p]` is an isometric involution, so velocity and exponent
//! determine each other. Hermitian velocities at an orthogonal projection
//! give unitary exponents and curves inside the orthogonal projections.

use crate::check::{Check, Checked};
use crate::error::{Error, Result};
use crate::involution::{a_norm, PositiveElement};
use crate::linalg::{mat_exp, mat_log_near_identity, ComplexMatrix, Tolerance};
use crate::projection::{cond_expectation, Idempotent, OrthProjection};

pub mod compat;

pub use compat::{
    compatible_star, compatible_star_with, omega_fiber_star, omega_fiber_star_with, Certificate,
    CompatibilityVerdict, SearchOptions, Status,
};

/// Velocity `x` at `base`: `base x base = (1 - base) x (1 - base) = 0`.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: Idempotent,
    x: ComplexMatrix,
}

fn diagonal_defect(q: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    let c = q.one_minus();
    let upper = (&(q * x) * q).norm();
    let lower = (&(&c * x) * &c).norm();
    upper.max(lower)
}

impl TangentVector {
    /// Tangent to the idempotents at `base`.
    pub fn new(base: Idempotent, x: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(base, x, Tolerance::default())
    }

    pub fn with_tolerance(base: Idempotent, x: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        base.matrix().ensure_same_dim(&x)?;
        x.ensure_finite()?;
        let scale = x.norm() * (1.0 + base.matrix().norm());
        if !tol.accepts(diagonal_defect(base.matrix(), &x), scale) {
            return Err(Error::NotTangent);
        }
        Ok(Self { base, x })
    }

    /// Hermitian tangent to the orthogonal projections at `base`.
    pub fn at_projection(base: &OrthProjection, x: ComplexMatrix) -> Result<Self> {
        let tol = Tolerance::default();
        let v = Self::with_tolerance(Idempotent::from(base.clone()), x, tol)?;
        if !tol.accepts(v.x.hermitian_defect(), v.x.norm()) {
            return Err(Error::NotTangent);
        }
        Ok(v)
    }

    pub fn zero(base: Idempotent) -> Self {
        let x = ComplexMatrix::zeros(base.dim());
        Self { base, x }
    }

    pub fn base(&self) -> &Idempotent {
        &self.base
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.x
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        tol.accepts(self.x.hermitian_defect(), self.x.norm())
    }
}

/// `[v, p] = v p - p v`.
pub fn bracket(v: &ComplexMatrix, p: &ComplexMatrix) -> ComplexMatrix {
    &(v * p) - &(p * v)
}

/// The curve `t -> e^{t g} p e^{-t g}` with generator `g = [v, p]`.
#[derive(Clone, Debug)]
pub struct Geodesic {
    direction: TangentVector,
    generator: ComplexMatrix,
}

impl Geodesic {
    pub fn new(direction: TangentVector) -> Self {
        let generator = bracket(&direction.x, direction.base.matrix());
        Self { direction, generator }
    }

    pub fn base(&self) -> &Idempotent {
        &self.direction.base
    }

    pub fn direction(&self) -> &TangentVector {
        &self.direction
    }

    /// `[v, p]`; the curve is `e^{t g} p e^{-t g}`.
    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    pub fn eval(&self, t: f64) -> Result<Idempotent> {
        if t == 0.0 {
            return Ok(self.direction.base.clone());
        }
        let g = self.generator.scale(t);
        let fwd = mat_exp(&g)?;
        let back = mat_exp(&-g)?;
        Ok(Idempotent::from_raw(&(&fwd * self.direction.base.matrix()) * &back))
    }

    /// Curve value at `t = 1`.
    pub fn endpoint(&self) -> Result<Idempotent> {
        self.eval(1.0)
    }

    /// `(t1 - t0) ||v||`; the speed is constant.
    pub fn length(&self, t0: f64, t1: f64) -> Result<f64> {
        if matches!(t1.partial_cmp(&t0), None | Some(std::cmp::Ordering::Less)) {
            return Err(Error::HypothesesViolated("interval end precedes start"));
        }
        Ok((t1 - t0) * self.direction.x.norm())
    }

    /// `(t1 - t0) ||v||_a`.
    pub fn length_a(&self, t0: f64, t1: f64, a: &PositiveElement) -> Result<f64> {
        if matches!(t1.partial_cmp(&t0), None | Some(std::cmp::Ordering::Less)) {
            return Err(Error::HypothesesViolated("interval end precedes start"));
        }
        Ok((t1 - t0) * a_norm(&self.direction.x, a)?)
    }
}

pub fn geodesic(direction: TangentVector) -> Geodesic {
    Geodesic::new(direction)
}

pub fn geodesic_length(g: &Geodesic, t0: f64, t1: f64) -> Result<f64> {
    g.length(t0, t1)
}

pub fn geodesic_length_a(g: &Geodesic, t0: f64, t1: f64, a: &PositiveElement) -> Result<f64> {
    g.length_a(t0, t1, a)
}

/// `e^{[v, p]} p e^{-[v, p]}`.
pub fn exp_p(direction: TangentVector) -> Result<Idempotent> {
    Geodesic::new(direction).endpoint()
}

/// Output of [`connect`]: `q = e^X p e^{-X}` with `X` off-diagonal.
#[derive(Clone, Debug)]
pub struct Connection {
    /// `X`.
    pub exponent: ComplexMatrix,
    /// `[X, p]`, the velocity of the geodesic from `p` that ends at `q`.
    pub velocity: TangentVector,
}

const CONNECT_TOL: f64 = 1e-8;

/// Off-diagonal `X` with `e^X p e^{-X} = q`, from
/// `X = (Id - E_p)(log v1) = (log v1 - log v2) / 2` where
/// `v1 = q p + (1 - q)(1 - p)` and `v2 = p q + (1 - p)(1 - q)`.
pub fn connect(p: &OrthProjection, q: &Idempotent) -> Result<Connection> {
    connect_checked(p, q)?.into_result()
}

pub fn connect_checked(p: &OrthProjection, q: &Idempotent) -> Result<Checked<Connection>> {
    p.matrix().ensure_same_dim(q.matrix())?;
    q.matrix().ensure_finite()?;
    let pm = p.matrix();
    let qm = q.matrix();
    let dist = (pm - qm).norm();
    if dist >= 1.0 - 1e-10 {
        return Err(Error::TooFar(dist));
    }
    let qc = qm.one_minus();
    let pc = p.complement();
    let v1 = &(qm * pm) + &(&qc * pc);
    let v2 = &(pm * qm) + &(pc * &qc);
    let id = ComplexMatrix::identity(p.dim());
    let l1 = mat_log_near_identity(&v1)?;
    let l2 = mat_log_near_identity(&v2)?;
    let x = &l1 - &cond_expectation(&l1, p)?;
    let alt = (&l1 - &l2).scale(0.5);
    let fwd = mat_exp(&x)?;
    let back = mat_exp(&-x.clone())?;
    let rebuilt = &(&fwd * pm) * &back;
    let checks = vec![
        Check::at_most("v1_distance", ((&v1 - &id).norm() - dist).abs(), 1e-9),
        Check::at_most("v2_distance", ((&v2 - &id).norm() - dist).abs(), 1e-9),
        Check::at_most("log_forms_agree", (&x - &alt).norm(), CONNECT_TOL),
        Check::at_most("tangent", diagonal_defect(pm, &x), CONNECT_TOL),
        Check::at_most("reconstructs_q", (&rebuilt - qm).norm(), CONNECT_TOL * (1.0 + qm.norm())),
    ];
    let velocity = TangentVector { base: Idempotent::from(p.clone()), x: bracket(&x, pm) };
    Ok(Checked::new(Connection { exponent: x, velocity }, checks))
}

/// The short geodesic of orthogonal projections from `p` to `r`.
pub fn short_geodesic_p(p: &OrthProjection, r: &OrthProjection) -> Result<Geodesic> {
    let c = connect(p, &Idempotent::from(r.clone()))?;
    let tol = Tolerance::new(CONNECT_TOL)?;
    if !c.velocity.is_hermitian(tol) {
        return Err(Error::Postcondition {
            name: "hermitian_velocity".into(),
            value: c.velocity.x.hermitian_defect(),
            tolerance: tol.bound(c.velocity.x.norm()),
        });
    }
    Ok(Geodesic::new(c.velocity))
}

/// Comparison of the `*` and `#a` geometries for projections commuting
/// with `a`.
#[derive(Clone, Debug)]
pub struct UnigeoReport {
    pub velocity: ComplexMatrix,
    pub norm_gap: f64,
    pub commutation_defect: f64,
    pub length_gap: f64,
    pub checks: Vec<Check>,
}

impl UnigeoReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn unigeo_check(p: &OrthProjection, r: &OrthProjection, a: &PositiveElement, tol: Tolerance) -> Result<UnigeoReport> {
    p.matrix().ensure_same_dim(r.matrix())?;
    p.matrix().ensure_same_dim(a.matrix())?;
    let am = a.matrix();
    let na = am.norm();
    if !tol.accepts(p.matrix().commutator(am).norm(), na) || !tol.accepts(r.matrix().commutator(am).norm(), na) {
        return Err(Error::HypothesesViolated("p and r must commute with a"));
    }
    let diff = r.matrix() - p.matrix();
    let norm_gap = (diff.norm() - a_norm(&diff, a)?).abs();
    let c = connect(p, &Idempotent::from(r.clone()))?;
    let v = c.velocity.x;
    let commutation_defect = v.commutator(am).norm();
    let length_gap = (v.norm() - a_norm(&v, a)?).abs();
    let checks = vec![
        Check::at_most("norm_gap", norm_gap, tol.atol()),
        Check::at_most("commutation_defect", commutation_defect, tol.atol() * na * v.norm()),
        Check::at_most("length_gap", length_gap, tol.atol()),
    ];
    Ok(UnigeoReport { velocity: v, norm_gap, commutation_defect, length_gap, checks })
}
