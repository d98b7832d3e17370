//! Involutions `x -> a^-1 x* a` induced by positive invertible matrices.
//!
//! Every positive definite `a` defines the inner product `<a xi, eta>`; the
//! adjoint for that product is `x^{#a} = a^-1 x* a` and the matching norm is
//! `||a^{1/2} x a^{-1/2}||`. Scalar multiples of `a` induce the same
//! involution but are kept distinct here.

use crate::error::{Error, Result};
use crate::linalg::{herm_eig_with, ComplexMatrix, Tolerance};

/// Positive definite matrix together with its inverse and square roots.
#[derive(Clone, Debug)]
pub struct PositiveElement {
    a: ComplexMatrix,
    a_inv: ComplexMatrix,
    a_half: ComplexMatrix,
    a_half_inv: ComplexMatrix,
}

impl PositiveElement {
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(a, Tolerance::default())
    }

    pub fn with_tolerance(a: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let eig = herm_eig_with(&a, tol)?;
        let nrm = eig.max().abs().max(eig.min().abs());
        if eig.min() <= tol.atol() * nrm {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            a_inv: eig.map(|l| 1.0 / l),
            a_half: eig.map(f64::sqrt),
            a_half_inv: eig.map(|l| 1.0 / l.sqrt()),
            a,
        })
    }

    pub fn identity(n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        Self {
            a: id.clone(),
            a_inv: id.clone(),
            a_half: id.clone(),
            a_half_inv: id,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn inv(&self) -> &ComplexMatrix {
        &self.a_inv
    }

    pub fn half(&self) -> &ComplexMatrix {
        &self.a_half
    }

    pub fn half_inv(&self) -> &ComplexMatrix {
        &self.a_half_inv
    }

    /// `||a|| * ||a^-1||`.
    pub fn condition(&self) -> f64 {
        self.a.norm() * self.a_inv.norm()
    }
}

/// `a^-1 x* a`.
pub fn a_adjoint(x: &ComplexMatrix, a: &PositiveElement) -> Result<ComplexMatrix> {
    x.ensure_same_dim(a.matrix())?;
    Ok(a.inv() * &x.adjoint() * a.matrix())
}

/// `||a^{1/2} x a^{-1/2}||`.
pub fn a_norm(x: &ComplexMatrix, a: &PositiveElement) -> Result<f64> {
    x.ensure_same_dim(a.matrix())?;
    Ok((a.half() * x * a.half_inv()).norm())
}

/// `a x = x* a` up to `tol * (1 + ||a|| ||x||)`.
pub fn is_a_selfadjoint(x: &ComplexMatrix, a: &PositiveElement, tol: Tolerance) -> bool {
    if x.dim() != a.dim() {
        return false;
    }
    let lhs = a.matrix() * x;
    let rhs = &x.adjoint() * a.matrix();
    tol.accepts((&lhs - &rhs).norm(), a.matrix().norm() * x.norm())
}

/// `u^{#a} u = I` up to `tol`.
pub fn is_a_unitary(u: &ComplexMatrix, a: &PositiveElement, tol: Tolerance) -> Result<bool> {
    crate::linalg::inverse(u)?;
    let prod = &a_adjoint(u, a)? * u;
    let defect = (&prod - &ComplexMatrix::identity(u.dim())).norm();
    Ok(defect <= tol.atol())
}

/// `a^{-1/2} x a^{1/2}`: the isometric *-isomorphism from the standard
/// involution onto `#a`.
pub fn star_isomorphism(x: &ComplexMatrix, a: &PositiveElement) -> Result<ComplexMatrix> {
    x.ensure_same_dim(a.matrix())?;
    Ok(a.half_inv() * x * a.half())
}

/// Inverse of [`star_isomorphism`]: `a^{1/2} x a^{-1/2}`.
pub fn star_isomorphism_inverse(x: &ComplexMatrix, a: &PositiveElement) -> Result<ComplexMatrix> {
    x.ensure_same_dim(a.matrix())?;
    Ok(a.half() * x * a.half_inv())
}
