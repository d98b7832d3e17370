//! Deciding whether a pair `(p, q)` admits a positive `a` making both
//! selfadjoint for `#a`.
//!
//! With `q = e^X p e^{-X}` the question reduces to finding a positive
//! definite `a` commuting with `p` such that `a X + X* a = 0`. The linear
//! part is solved exactly: the constraint is a real linear map on Hermitian
//! block-diagonal matrices and its nullspace comes from a one-sided Jacobi
//! SVD. Positivity is then a concave problem, the maximization of the
//! smallest eigenvalue over the trace-normalized nullspace, handled by
//! smoothed ascent with seeded restarts. The flipped variant uses
//! `a X - X* a = 0`, which characterizes pairs where the `#a` retraction
//! sends `q` to `p`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::connect;
use crate::check::Check;
use crate::error::Result;
use crate::involution::{is_a_selfadjoint, star_isomorphism, star_isomorphism_inverse, PositiveElement};
use crate::linalg::{c64, herm_eig, Complex64, ComplexMatrix, Tolerance};
use crate::polar::omega;
use crate::projection::{cond_expectation, Idempotent, OrthProjection};
use crate::sample;

const FEASIBLE_MIN_EIG: f64 = 1e-8;
const INFEASIBLE_MIN_EIG: f64 = 1e-12;
const WITNESS_TOL: f64 = 1e-8;
const TRANSPORT_TOL: f64 = 1e-7;
const SAMPLING_MAX_DIM: usize = 4;
const SAMPLING_ANGLES: usize = 720;
const DUAL_MARGIN: f64 = 1e-9;
/// Smoothing parameters of the soft minimum, coarse to fine.
const FULL_SCHEDULE: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
/// The objective is concave, so restarts only guard against stalls and use
/// a shorter schedule.
const RESTART_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
    Indeterminate,
}

/// What backs the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// A verified positive definite witness.
    Witness,
    /// The constraint map is injective.
    TrivialNullspace,
    /// Every solution of the constraint has trace zero.
    TracelessNullspace,
    /// A positive semidefinite functional is negative on every normalized
    /// solution.
    SeparatingFunctional,
    /// The smallest eigenvalue cannot be pushed above zero.
    NoPositiveElement,
    /// The search neither found a witness nor ruled one out.
    Inconclusive,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { seed: 0, restarts: 64 }
    }
}

#[derive(Clone, Debug)]
pub struct CompatibilityVerdict {
    pub status: Status,
    pub certificate: Certificate,
    /// Best smallest eigenvalue over the trace-normalized solution space.
    pub min_eigenvalue: f64,
    /// Positive witness with trace `n`.
    pub witness: Option<PositiveElement>,
    /// Upper left block of the witness.
    pub b: Option<ComplexMatrix>,
    /// Inverse of the lower right block of the witness.
    pub c: Option<ComplexMatrix>,
    /// The exponent `X` with `q = e^X p e^{-X}`.
    pub exponent: ComplexMatrix,
    pub nullspace_dim: usize,
    pub restarts_used: usize,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    /// `a X + X* a = 0`.
    Skew,
    /// `a X - X* a = 0`.
    Flip,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Skew => 1.0,
            Sign::Flip => -1.0,
        }
    }
}

pub fn compatible_star(p: &OrthProjection, q: &Idempotent, seed: u64) -> Result<CompatibilityVerdict> {
    compatible_star_with(p, q, SearchOptions { seed, ..Default::default() })
}

pub fn compatible_star_with(p: &OrthProjection, q: &Idempotent, opts: SearchOptions) -> Result<CompatibilityVerdict> {
    decide(p, q, opts, Sign::Skew)
}

pub fn omega_fiber_star(p: &OrthProjection, q: &Idempotent, seed: u64) -> Result<CompatibilityVerdict> {
    omega_fiber_star_with(p, q, SearchOptions { seed, ..Default::default() })
}

pub fn omega_fiber_star_with(p: &OrthProjection, q: &Idempotent, opts: SearchOptions) -> Result<CompatibilityVerdict> {
    decide(p, q, opts, Sign::Flip)
}

/// Frobenius-orthonormal basis of the Hermitian matrices commuting with `p`.
fn block_diagonal_basis(p: &OrthProjection) -> Result<Vec<ComplexMatrix>> {
    let n = p.dim();
    let eig = herm_eig(&p.matrix().hermitian_part())?;
    let column = |j: usize| -> Vec<Complex64> { (0..n).map(|i| eig.vectors[(i, j)]).collect() };
    let (lower, upper): (Vec<usize>, Vec<usize>) = (0..n).partition(|&j| eig.values[j] < 0.5);
    let outer = |u: &[Complex64], v: &[Complex64]| ComplexMatrix::from_fn(n, |i, j| u[i] * v[j].conj());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::new();
    for block in [upper, lower] {
        let cols: Vec<Vec<Complex64>> = block.iter().map(|&j| column(j)).collect();
        for i in 0..cols.len() {
            basis.push(outer(&cols[i], &cols[i]));
            for j in i + 1..cols.len() {
                let a = outer(&cols[i], &cols[j]);
                let sym = (&a + &a.adjoint()).scale(r);
                let skew = (&a - &a.adjoint()).scale_complex(c64(0.0, r));
                basis.push(sym);
                basis.push(skew);
            }
        }
    }
    Ok(basis)
}

/// Right singular vectors and singular values of a real matrix given by
/// its columns, from one-sided Jacobi rotations.
fn hestenes(mut cols: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = cols.len();
    let mut v: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    for _ in 0..100 {
        let mut rotated = false;
        for i in 0..d {
            for j in i + 1..d {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut cols, &mut v] {
                    let (left, right) = m.split_at_mut(j);
                    for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                        let (xi, yj) = (*x, *y);
                        *x = c * xi - s * yj;
                        *y = s * xi + c * yj;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    (sigma, v)
}

fn combine(coeffs: &[f64], mats: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n);
    for (c, m) in coeffs.iter().zip(mats) {
        if *c != 0.0 {
            out += &m.scale(*c);
        }
    }
    out
}

/// Basis of the solutions of the constraint inside the block-diagonal
/// Hermitian matrices.
fn constraint_nullspace(p: &OrthProjection, x: &ComplexMatrix, sign: Sign) -> Result<Vec<ComplexMatrix>> {
    let n = p.dim();
    let basis = block_diagonal_basis(p)?;
    let xs = x.adjoint();
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| {
            let image = &(e * x) + &(&xs * e).scale(sign.factor());
            image.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
        })
        .collect();
    let (sigma, v) = hestenes(cols);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let threshold = Tolerance::default().bound(smax);
    Ok(sigma
        .iter()
        .zip(&v)
        .filter(|(s, _)| **s <= threshold)
        .map(|(_, coeffs)| combine(coeffs, &basis, n))
        .collect())
}

fn min_eig(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(&m.hermitian_part())?.min())
}

/// Affine slice `{a0 + sum c_j z_j}` of trace-`n` solutions.
struct Slice {
    a0: ComplexMatrix,
    dirs: Vec<ComplexMatrix>,
    radius: f64,
}

impl Slice {
    fn at(&self, c: &[f64]) -> ComplexMatrix {
        &self.a0 + &combine(c, &self.dirs, self.a0.dim())
    }

    /// Soft minimum `-mu log sum exp(-l_i / mu)` and its gradient, plus the
    /// exact smallest eigenvalue.
    fn soft_min(&self, c: &[f64], mu: f64) -> Result<(f64, Vec<f64>, f64)> {
        let a = self.at(c);
        let eig = herm_eig(&a.hermitian_part())?;
        let lmin = eig.min();
        let weights: Vec<f64> = eig.values.iter().map(|l| (-(l - lmin) / mu).exp()).collect();
        let total: f64 = weights.iter().sum();
        let value = lmin - mu * total.ln();
        let n = a.dim();
        let grad = self
            .dirs
            .iter()
            .map(|z| {
                (0..n)
                    .map(|k| {
                        let v: Vec<Complex64> = (0..n).map(|i| eig.vectors[(i, k)]).collect();
                        let mut quad = c64(0.0, 0.0);
                        for i in 0..n {
                            for j in 0..n {
                                quad += v[i].conj() * z[(i, j)] * v[j];
                            }
                        }
                        weights[k] / total * quad.re
                    })
                    .sum()
            })
            .collect();
        Ok((value, grad, lmin))
    }

    /// Upper bound on `<W, a>` over the slice ball, for the positive
    /// semidefinite `W` built from the soft-min weights at `c`. A negative
    /// value proves that no positive definite element exists, since those
    /// pair positively with every nonzero positive semidefinite `W`.
    fn dual_bound(&self, c: &[f64], mu: f64) -> Result<f64> {
        let (_, g, _) = self.soft_min(c, mu)?;
        let a = self.at(c);
        let eig = herm_eig(&a.hermitian_part())?;
        let lmin = eig.min();
        let n = a.dim();
        let weights: Vec<f64> = eig.values.iter().map(|l| (-(l - lmin) / mu).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut at_base = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let v: Vec<Complex64> = (0..n).map(|i| eig.vectors[(i, k)]).collect();
            let mut quad = c64(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    quad += v[i].conj() * self.a0[(i, j)] * v[j];
                }
            }
            at_base += w / total * quad.re;
        }
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(at_base + self.radius * gnorm)
    }

    /// Projection onto the ball `||c|| <= radius`, which holds every
    /// positive element of the slice: such an element has trace `n`, so its
    /// Frobenius norm is at most `n`, and the directions are orthogonal to
    /// `a0`.
    fn project(&self, mut c: Vec<f64>) -> Vec<f64> {
        let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > self.radius {
            c.iter_mut().for_each(|x| *x *= self.radius / nrm);
        }
        c
    }

    /// Smoothed projected ascent with backtracking; returns the best point
    /// seen and its smallest eigenvalue.
    fn ascend(&self, start: Vec<f64>, schedule: &[f64], iters: usize) -> Result<(Vec<f64>, f64)> {
        let mut c = self.project(start);
        let mut best = (c.clone(), min_eig(&self.at(&c))?);
        if self.dirs.is_empty() {
            return Ok(best);
        }
        for &mu in schedule {
            let mut step = 1.0;
            for _ in 0..iters {
                let (f, g, lmin) = self.soft_min(&c, mu)?;
                if lmin > best.1 {
                    best = (c.clone(), lmin);
                }
                let mut accepted = None;
                while step > 1e-12 {
                    let trial = self.project(c.iter().zip(&g).map(|(ci, gi)| ci + step * gi).collect());
                    let gain: f64 = g.iter().zip(trial.iter().zip(&c)).map(|(gi, (t, ci))| gi * (t - ci)).sum();
                    if gain <= 1e-300 {
                        break;
                    }
                    let (ft, _, lt) = self.soft_min(&trial, mu)?;
                    if ft >= f + 1e-4 * gain {
                        if lt > best.1 {
                            best = (trial.clone(), lt);
                        }
                        c = trial;
                        accepted = Some(ft - f);
                        step *= 2.0;
                        break;
                    }
                    step *= 0.5;
                }
                match accepted {
                    Some(rise) if rise > 1e-13 * (1.0 + f.abs()) => {}
                    _ => break,
                }
            }
        }
        Ok(best)
    }
}

/// Orthonormal basis of the complement of the unit vector `w` in `R^m`.
fn complement_basis(w: &[f64]) -> Vec<Vec<f64>> {
    let m = w.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for k in 0..m {
        let mut e: Vec<f64> = (0..m).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        for _ in 0..2 {
            for b in std::iter::once(w).chain(out.iter().map(|v| v.as_slice())) {
                let d: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let nrm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            out.push(e.iter().map(|x| x / nrm).collect());
        }
        if out.len() + 1 == m {
            break;
        }
    }
    out
}

/// Looks for a positive definite element on great circles through pairs of
/// slice directions.
fn plane_sampling(slice: &Slice) -> Result<Option<ComplexMatrix>> {
    let mut dirs = vec![slice.a0.scale(1.0 / slice.a0.frobenius())];
    dirs.extend(slice.dirs.iter().cloned());
    let positive = |m: &ComplexMatrix| -> Result<bool> {
        let tr = m.trace().re;
        Ok(tr > 0.0 && min_eig(&m.scale(m.dim() as f64 / tr))? > FEASIBLE_MIN_EIG)
    };
    for d in &dirs {
        for s in [1.0, -1.0] {
            let m = d.scale(s);
            if positive(&m)? {
                return Ok(Some(m));
            }
        }
    }
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            for k in 0..SAMPLING_ANGLES {
                let th = 2.0 * std::f64::consts::PI * k as f64 / SAMPLING_ANGLES as f64;
                let m = &dirs[i].scale(th.cos()) + &dirs[j].scale(th.sin());
                if positive(&m)? {
                    return Ok(Some(m));
                }
            }
        }
    }
    Ok(None)
}

fn decide(p: &OrthProjection, q: &Idempotent, opts: SearchOptions, sign: Sign) -> Result<CompatibilityVerdict> {
    let n = p.dim();
    let conn = connect(p, q)?;
    let x = conn.exponent;
    let null = constraint_nullspace(p, &x, sign)?;
    let mut verdict = CompatibilityVerdict {
        status: Status::Infeasible,
        certificate: Certificate::TrivialNullspace,
        min_eigenvalue: f64::NEG_INFINITY,
        witness: None,
        b: None,
        c: None,
        exponent: x.clone(),
        nullspace_dim: null.len(),
        restarts_used: 0,
        checks: Vec::new(),
    };
    if null.is_empty() {
        verdict.checks.push(Check::above("nullspace_dim", 0.0, 0.0));
        return Ok(verdict);
    }
    let traces: Vec<f64> = null.iter().map(|m| m.trace().re).collect();
    let tnorm = traces.iter().map(|t| t * t).sum::<f64>().sqrt();
    if tnorm <= Tolerance::default().atol() {
        verdict.certificate = Certificate::TracelessNullspace;
        verdict.checks.push(Check::above("nullspace_trace", tnorm, Tolerance::default().atol()));
        return Ok(verdict);
    }
    let w: Vec<f64> = traces.iter().map(|t| t / tnorm).collect();
    let a0 = combine(&w, &null, n).scale(n as f64 / tnorm);
    let dirs: Vec<ComplexMatrix> = complement_basis(&w).iter().map(|z| combine(z, &null, n)).collect();
    let slice = Slice { a0, dirs, radius: n as f64 };

    let (mut best_c, mut best) = slice.ascend(vec![0.0; slice.dirs.len()], &FULL_SCHEDULE, 150)?;
    if best < INFEASIBLE_MIN_EIG {
        let mut bound = f64::INFINITY;
        for mu in [1e-3, 1e-4, 1e-6] {
            bound = bound.min(slice.dual_bound(&best_c, mu)?);
        }
        if bound < -DUAL_MARGIN {
            verdict.min_eigenvalue = best;
            verdict.certificate = Certificate::SeparatingFunctional;
            verdict.checks.push(Check::below("separating_bound", bound, -DUAL_MARGIN));
            return Ok(verdict);
        }
    }
    let mut rng = sample::rng(opts.seed);
    while best <= FEASIBLE_MIN_EIG && verdict.restarts_used < opts.restarts && !slice.dirs.is_empty() {
        verdict.restarts_used += 1;
        let start: Vec<f64> = (0..slice.dirs.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let (c, l) = slice.ascend(start, &RESTART_SCHEDULE, 40)?;
        if l > best {
            best = l;
            best_c = c;
        }
    }
    verdict.min_eigenvalue = best;

    let mut candidate = (best > FEASIBLE_MIN_EIG).then(|| slice.at(&best_c));
    if candidate.is_none() && best < INFEASIBLE_MIN_EIG && n <= SAMPLING_MAX_DIM {
        candidate = plane_sampling(&slice)?;
    }
    let Some(raw) = candidate else {
        verdict.certificate =
            if best < INFEASIBLE_MIN_EIG { Certificate::NoPositiveElement } else { Certificate::Inconclusive };
        verdict.status = if best < INFEASIBLE_MIN_EIG { Status::Infeasible } else { Status::Indeterminate };
        verdict.checks.push(Check::above("min_eigenvalue", best, FEASIBLE_MIN_EIG));
        return Ok(verdict);
    };
    let a = raw.hermitian_part();
    let a = a.scale(n as f64 / a.trace().re);
    verdict.min_eigenvalue = verdict.min_eigenvalue.max(min_eig(&a)?);
    verify_witness(&mut verdict, p, q, a, sign)?;
    Ok(verdict)
}

fn verify_witness(
    verdict: &mut CompatibilityVerdict,
    p: &OrthProjection,
    q: &Idempotent,
    a: ComplexMatrix,
    sign: Sign,
) -> Result<()> {
    let x = &verdict.exponent;
    let lmin = min_eig(&a)?;
    let mut checks = vec![Check::above("min_eigenvalue", lmin, FEASIBLE_MIN_EIG)];
    let na = a.norm();
    checks.push(Check::at_most(
        "block_diagonal",
        (&a - &cond_expectation(&a, p)?).norm(),
        WITNESS_TOL * na,
    ));
    let residual = &(&a * x) + &(&x.adjoint() * &a).scale(sign.factor());
    // roundoff floor keeps X = 0 decidable
    let floor = 16.0 * f64::EPSILON * na;
    checks.push(Check::at_most("constraint_residual", residual.norm(), WITNESS_TOL * na * x.norm() + floor));

    let witness = PositiveElement::new(a.clone()).ok();
    let tol = Tolerance::new(WITNESS_TOL)?;
    if let Some(w) = &witness {
        checks.push(Check::holds("p_a_selfadjoint", is_a_selfadjoint(p.matrix(), w, tol)));
        match sign {
            Sign::Skew => checks.push(Check::holds("q_a_selfadjoint", is_a_selfadjoint(q.matrix(), w, tol))),
            Sign::Flip => {
                // retraction for #a, computed in the * picture
                let moved = Idempotent::from_raw(star_isomorphism_inverse(q.matrix(), w)?);
                let back = star_isomorphism(omega(&moved)?.matrix(), w)?;
                checks.push(Check::at_most("star_a_retraction", (&back - p.matrix()).norm(), TRANSPORT_TOL));
            }
        }
    } else {
        checks.push(Check::holds("witness_positive", false));
    }

    let b = p.compress(&a);
    let c = p.complement_block_inverse(&a)?;
    let upper = p.upper_corner(x);
    let lower = p.lower_corner(x);
    let predicted = &(&c * &upper.adjoint()) * &b;
    let cond3 = &lower + &predicted.scale(sign.factor());
    let scale = 1.0 + c.norm() * upper.norm() * b.norm();
    checks.push(Check::at_most("block_relation", cond3.norm(), WITNESS_TOL * scale));

    let ok = checks.iter().all(|c| c.pass) && witness.is_some();
    verdict.checks = checks;
    verdict.b = Some(b);
    verdict.c = Some(c);
    verdict.witness = witness;
    if ok {
        verdict.status = Status::Feasible;
        verdict.certificate = Certificate::Witness;
    } else {
        verdict.status = Status::Indeterminate;
        verdict.certificate = Certificate::Inconclusive;
    }
    Ok(())
}
