//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors, so that `m = V diag(values) V*`.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// Reassembles `V diag(f(lambda)) V*`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &w) in fv.iter().enumerate() {
                acc += v[(i, k)] * v[(j, k)].conj() * w;
            }
            acc
        })
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Checked Hermitian eigendecomposition with the default tolerance.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    herm_eig_with(m, Tolerance::default())
}

pub fn herm_eig_with(m: &ComplexMatrix, tol: Tolerance) -> Result<HermEig> {
    m.ensure_finite()?;
    let defect = (m - &m.adjoint()).max_abs();
    // Entrywise defect first: cheap, and avoids recursing into the norm.
    if defect > 0.0 {
        let d = (m - &m.adjoint()).norm();
        if !tol.accepts(d, m.norm()) {
            return Err(Error::NotHermitian(d));
        }
    }
    Ok(jacobi(m))
}

/// Largest singular value, computed from the largest eigenvalue of `m* m`
/// after rescaling by the largest entry.
pub(crate) fn spectral_norm(m: &ComplexMatrix) -> f64 {
    let s = m.max_abs();
    if s == 0.0 || !s.is_finite() {
        return if s.is_nan() { f64::NAN } else { s };
    }
    let ms = m.scale(1.0 / s);
    let g = &ms.adjoint() * &ms;
    s * jacobi(&g).max().max(0.0).sqrt()
}

/// Unchecked Jacobi on the Hermitian part of `m`.
pub(crate) fn jacobi(m: &ComplexMatrix) -> HermEig {
    let n = m.dim();
    let mut a = m.hermitian_part();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();
    if scale == 0.0 {
        return HermEig {
            values: vec![0.0; n],
            vectors: v,
        };
    }
    let negligible = scale * f64::EPSILON * 1e-2;

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if abs <= negligible
                    || (app.abs() + 1e2 * abs == app.abs() && aqq.abs() + 1e2 * abs == aqq.abs())
                {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                // Unimodular phase that makes the (p, q) entry real, followed
                // by a real symmetric rotation.
                let e = (apq / abs).conj();
                let zeta = (aqq - app) / (2.0 * abs);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    let sgn = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = e * (-s);
                let jqq = e * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    HermEig { values, vectors }
}
