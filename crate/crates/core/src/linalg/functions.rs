use num_complex::Complex64;

use super::eig::{herm_eig_with, jacobi};
use super::matrix::{ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

/// Largest singular value of `m`.
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_finite()?;
    Ok(m.norm())
}

/// Unique positive semidefinite square root.
pub fn herm_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_sqrt_with(m, Tolerance::default())
}

pub fn herm_sqrt_with(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let eig = herm_eig_with(m, tol)?;
    let scale = eig.max().abs().max(eig.min().abs());
    if eig.min() < -tol.atol() * scale {
        return Err(Error::NotPsd(eig.min()));
    }
    Ok(eig.map(|l| l.max(0.0).sqrt()))
}

/// Matrix exponential by scaling and squaring around a Taylor series.
///
/// The scaling exponent is picked from the Frobenius norm (an upper bound on
/// the operator norm) so that the scaled argument has norm at most 1/2.
pub fn mat_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.ensure_finite()?;
    let n = m.dim();
    let nrm = m.frobenius();
    let mut squarings = 0u32;
    while nrm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let a = m.scale(1.0 / 2f64.powi(squarings as i32));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=60 {
        term = (&term * &a).scale(1.0 / k as f64);
        result += &term;
        if term.frobenius() < 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

const LOG_TERM_TOL: f64 = 1e-15;
const LOG_MAX_TERMS: usize = 200_000;

/// Principal logarithm of `v` from the alternating series
/// `sum_{k>=1} (-1)^(k-1) (v - I)^k / k`, valid for `||v - I|| < 1`.
pub fn mat_log_near_identity(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    v.ensure_finite()?;
    let n = v.dim();
    let d = v - &ComplexMatrix::identity(n);
    let r = d.norm();
    if r >= 1.0 - 1e-12 {
        return Err(Error::LogDomain(r));
    }
    let mut sum = ComplexMatrix::zeros(n);
    let mut power = d.clone();
    for k in 1..=LOG_MAX_TERMS {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let coeff = sign / k as f64;
        sum += &power.scale(coeff);
        if power.frobenius() / (k as f64) < LOG_TERM_TOL {
            return Ok(sum);
        }
        power = &power * &d;
    }
    Err(Error::NoConvergence(LOG_MAX_TERMS))
}

/// Polar factors `c = unitary * positive` with `positive = |c|`.
#[derive(Clone, Debug)]
pub struct Polar {
    pub unitary: ComplexMatrix,
    pub positive: ComplexMatrix,
}

pub fn polar(c: &ComplexMatrix) -> Result<Polar> {
    polar_with(c, Tolerance::default())
}

pub fn polar_with(c: &ComplexMatrix, tol: Tolerance) -> Result<Polar> {
    c.ensure_finite()?;
    let s = c.max_abs();
    if s == 0.0 {
        return Err(Error::Singular);
    }
    // Work on c / s so that c* c stays well scaled for the singularity test.
    let cs = c.scale(1.0 / s);
    let eig = jacobi(&(&cs.adjoint() * &cs));
    let sigma_max = eig.max().max(0.0).sqrt();
    let sigma_min = eig.min().max(0.0).sqrt();
    if sigma_min <= tol.atol() * sigma_max {
        return Err(Error::Singular);
    }
    // Scaled Newton iteration X <- (g X + (g X)^-* / g) / 2 for the unitary factor.
    let mut x = cs;
    for _ in 0..POLAR_MAX_ITERS {
        let xi = inverse(&x)?;
        let g = (xi.frobenius() / x.frobenius()).sqrt();
        let next = (&x.scale(g) + &xi.adjoint().scale(1.0 / g)).scale(0.5);
        let step = (&next - &x).frobenius();
        x = next;
        if step <= 1e-14 * (1.0 + (c.dim() as f64).sqrt()) {
            break;
        }
    }
    let unitary = x;
    let positive = (&unitary.adjoint() * c).hermitian_part();
    Ok(Polar { unitary, positive })
}

const POLAR_MAX_ITERS: usize = 100;

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.ensure_finite()?;
    let n = m.dim();
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(Error::Singular);
    }
    let threshold = n as f64 * f64::EPSILON * scale;
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[(r, col)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty range");
        if piv_abs <= threshold {
            return Err(Error::Singular);
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(piv, j)];
                inv[(piv, j)] = t;
            }
        }
        let d = Complex64::new(1.0, 0.0) / a[(col, col)];
        for j in 0..n {
            a[(col, j)] *= d;
            inv[(col, j)] *= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for j in 0..n {
                let acj = a[(col, j)];
                let icj = inv[(col, j)];
                a[(r, j)] -= f * acj;
                inv[(r, j)] -= f * icj;
            }
        }
    }
    Ok(inv)
}

/// Hermitian within tolerance with smallest eigenvalue above `atol * ||m||`.
pub fn is_positive_definite(m: &ComplexMatrix) -> bool {
    is_positive_definite_with(m, Tolerance::default())
}

pub fn is_positive_definite_with(m: &ComplexMatrix, tol: Tolerance) -> bool {
    match herm_eig_with(m, tol) {
        Ok(eig) => {
            let nrm = eig.max().abs().max(eig.min().abs());
            eig.min() > tol.atol() * nrm
        }
        Err(_) => false,
    }
}
