//! Deterministic battery of the crate's invariants on seeded instances.
//!
//! Every case draws fresh random inputs of size `n` from one seeded stream
//! and evaluates every invariant on them. For each invariant the report
//! keeps the worst check seen over all cases, so the output stays the same
//! size for any number of cases.

use std::collections::HashMap;

use rand::Rng;

use crate::check::Check;
use crate::error::{Error, Result};
use crate::fibration::{
    cross_section_checked, phi, phi_checked, phi_series_at, phi_series_at_identity, tangent_phi_a,
    tangent_phi_p_at_identity, SeriesControl,
};
use crate::geodesic::{
    compatible_star, connect, exp_p, geodesic, omega_fiber_star, Status, TangentVector,
};
use crate::involution::{a_adjoint, a_norm, is_a_selfadjoint, star_isomorphism_inverse, PositiveElement};
use crate::io::{parse_matrix, print_matrix};
use crate::linalg::{herm_eig, herm_sqrt, mat_exp, mat_log_near_identity, op_norm, polar, ComplexMatrix, Tolerance};
use crate::polar::{buckholtz_checked, omega, omega_a, omega_a_inverse, omega_checked, omega_phi_move_checked};
use crate::projection::{cond_expectation, kerzman_stein, orth_from_idempotent, Idempotent, OrthProjection};
use crate::sample::{self, ChaCha8Rng};

/// Smallest fraction of constructed compatible pairs that must be decided
/// feasible.
pub const MIN_FEASIBLE_FRACTION: f64 = 0.98;

#[derive(Clone, Debug)]
pub struct SuiteReport {
    /// Worst check per invariant, in a fixed order.
    pub checks: Vec<Check>,
    pub cases: usize,
    /// Individual check evaluations.
    pub evaluations: usize,
    /// Failed evaluations per invariant, same order as `checks`.
    pub failures: Vec<usize>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn total_failures(&self) -> usize {
        self.failures.iter().sum()
    }
}

#[derive(Default)]
struct Battery {
    index: HashMap<String, usize>,
    worst: Vec<Check>,
    failures: Vec<usize>,
    evaluations: usize,
}

impl Battery {
    fn record(&mut self, c: Check) {
        self.evaluations += 1;
        let failed = !c.pass;
        let i = match self.index.get(&c.name) {
            Some(&i) => {
                let cur = &self.worst[i];
                let replace = (failed && cur.pass) || (failed == !cur.pass && c.severity() > cur.severity());
                if replace {
                    self.worst[i] = c;
                }
                i
            }
            None => {
                self.index.insert(c.name.clone(), self.worst.len());
                self.worst.push(c);
                self.failures.push(0);
                self.worst.len() - 1
            }
        };
        if failed {
            self.failures[i] += 1;
        }
    }

    fn group(&mut self, name: &str, result: Result<Vec<Check>>) {
        match result {
            Ok(checks) => checks.into_iter().for_each(|c| self.record(c)),
            Err(_) => self.record(Check::holds(format!("{name}_evaluates"), false)),
        }
    }
}

type Rng8 = ChaCha8Rng;

fn diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

fn linalg(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let m = sample::positive(rng, n, 1e4);
    let s = herm_sqrt(&m)?;
    let h = sample::complex(rng, n, 1.0);
    let h = h.scale(0.9 * rng.random::<f64>() / h.norm());
    let v = &ComplexMatrix::identity(n) + &h;
    let back = mat_exp(&mat_log_near_identity(&v)?)?;
    let c = sample::with_condition(rng, n, 1e4);
    let pol = polar(&c)?;
    let rho = &pol.unitary;
    let x = sample::complex(rng, n, 3.0);
    let y = sample::complex(rng, n, 3.0);
    Ok(vec![
        Check::at_most("sqrt_squares_back", diff(&(&s * &s), &m), 1e-10 * (1.0 + m.norm())),
        Check::at_most("exp_log_round_trip", diff(&back, &v), 1e-9),
        Check::at_most(
            "polar_unitary",
            diff(&(&rho.adjoint() * rho), &ComplexMatrix::identity(n)),
            1e-9 * c.norm().max(1.0),
        ),
        Check::at_most("polar_reconstructs", diff(&(rho * &pol.positive), &c), 1e-9 * c.norm()),
        Check::at_most("norm_submultiplicative", op_norm(&(&x * &y))? - x.norm() * y.norm(), 1e-12),
    ])
}

fn involutions(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let a = sample::positive_element(rng, n, 100.0);
    let x = sample::complex(rng, n, 1.0);
    let y = sample::complex(rng, n, 1.0);
    let xs = a_adjoint(&x, &a)?;
    let twice = a_adjoint(&xs, &a)?;
    let prod = a_adjoint(&(&x * &y), &a)?;
    let rev = &a_adjoint(&y, &a)? * &xs;
    let t = star_isomorphism_inverse(&x, &a)?;
    let via_eig = herm_eig(&(&t.adjoint() * &t).hermitian_part())?.max().max(0.0).sqrt();
    let transported = star_isomorphism_inverse(&xs, &a)?;
    let scaled = PositiveElement::new(a.matrix().scale(4.0))?;
    let scale = 1.0 + x.norm() * a.condition();
    Ok(vec![
        Check::at_most("adjoint_involution", diff(&twice, &x), 1e-10 * scale),
        Check::at_most("adjoint_anti_multiplicative", diff(&prod, &rev), 1e-10 * scale * (1.0 + y.norm())),
        Check::at_most("a_norm_two_ways", (a_norm(&x, &a)? - via_eig).abs(), 1e-12 * (1.0 + via_eig)),
        Check::at_most("star_transport", diff(&transported, &t.adjoint()), 1e-10 * scale),
        Check::at_most("center_degeneracy", diff(&a_adjoint(&x, &scaled)?, &xs), 0.0),
    ])
}

fn min_eig(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(&m.hermitian_part())?.min())
}

fn projections(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let p = sample::any_orth_projection(rng, n);
    let x = sample::complex(rng, n, 1.0);
    let b = cond_expectation(&sample::complex(rng, n, 1.0), &p)?;
    let c = cond_expectation(&sample::complex(rng, n, 1.0), &p)?;
    let e = |m: &ComplexMatrix| cond_expectation(m, &p);
    let module_gap = diff(&e(&(&(&b * &x) * &c))?, &(&(&b * &e(&x)?) * &c));
    let star_gap = diff(&e(&x.adjoint())?, &e(&x)?.adjoint());
    let lower = sample::hermitian(rng, n, 1.0);
    let upper = &lower + &sample::positive(rng, n, 100.0);
    let monotone = min_eig(&e(&(&upper - &lower))?)?;
    let psd = sample::positive(rng, n, 1e3);
    let pinching = min_eig(&(&e(&psd)?.scale(2.0) - &psd))?;

    let q = sample::idempotent(rng, n, 10.0);
    let qm = q.matrix();
    let z = sample::complex(rng, n, 1.0);
    let same = Idempotent::from_raw(qm * &(&ComplexMatrix::identity(n) + &(&z * &q.complement().into_matrix())));
    let other = sample::idempotent(rng, n, 2.0);
    let tol = Tolerance::default();
    let range = |r: &Idempotent| -> Result<(bool, bool)> {
        let rm = r.matrix();
        let algebraic = tol.accepts(diff(&(qm * rm), rm), rm.norm() * qm.norm())
            && tol.accepts(diff(&(rm * qm), qm), rm.norm() * qm.norm());
        let geometric = diff(orth_from_idempotent(r)?.matrix(), orth_from_idempotent(&q)?.matrix()) <= 1e-9;
        Ok((algebraic, geometric))
    };
    let (alg_same, geo_same) = range(&same)?;
    let (alg_other, geo_other) = range(&other)?;

    let pc = sample::any_orth_projection(rng, n);
    let len = 1.0 + 2.0 * rng.random::<f64>();
    let corner = sample::corner(rng, &pc, len);
    let chart = exp_p(TangentVector::new(Idempotent::from(pc.clone()), corner.clone())?)?;
    Ok(vec![
        Check::at_most("expectation_module_map", module_gap, 1e-10 * (1.0 + b.norm() * x.norm() * c.norm())),
        Check::at_most("expectation_star", star_gap, 1e-12),
        Check::at_most("expectation_monotone", -monotone, 1e-10),
        Check::at_most("expectation_contractive", e(&x)?.norm() - x.norm(), 1e-12 * (1.0 + x.norm())),
        Check::at_most("expectation_pinching", -pinching, 1e-10 * (1.0 + psd.norm())),
        Check::holds("range_characterization", alg_same && geo_same && alg_other == geo_other),
        Check::at_most(
            "range_formulas_agree",
            diff(orth_from_idempotent(&q)?.matrix(), kerzman_stein(&q)?.matrix()),
            1e-9 * (1.0 + qm.norm()),
        ),
        Check::at_most("affine_chart", diff(chart.matrix(), &(pc.matrix() + &corner)), 1e-10 * (1.0 + corner.norm())),
    ])
}

/// Central difference error at `eps` and `eps / 10`, with the error constant
/// fitted at `eps`.
fn quadratic_fd(name: &str, at: impl Fn(f64) -> Result<ComplexMatrix>, exact: &ComplexMatrix) -> Result<Check> {
    let mut errs = Vec::new();
    for eps in [1e-4, 1e-5] {
        let fd = (&at(eps)? - &at(-eps)?).scale(0.5 / eps);
        errs.push(diff(&fd, exact));
    }
    let fitted = errs[0] / 1e-8;
    // second difference carries a rounding floor of order eps_mach / eps
    let floor = 1e-9 * (1.0 + exact.norm());
    Ok(Check::at_most(name, errs[1], 2.0 * fitted * 1e-10 + floor))
}

fn fibration(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let p = sample::any_orth_projection(rng, n);
    let a = sample::positive_element(rng, n, 1e3);
    let checked = phi_checked(&p, &a)?;
    let mut checks: Vec<Check> = checked
        .checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("phi_{}", c.name);
            c
        })
        .collect();
    let q = checked.value;
    let range = orth_from_idempotent(&q)?;
    checks.push(Check::at_most("phi_range_is_p", diff(range.matrix(), p.matrix()), 1e-9 * (1.0 + q.matrix().norm())));

    let h = sample::hermitian_with_norm(rng, n, 0.5);
    let ctl = SeriesControl::new(400, 1e-15)?;
    let series = phi_series_at_identity(&p, &h, ctl)?;
    let direct = phi(&p, &PositiveElement::new(&ComplexMatrix::identity(n) + &h)?)?;
    let scale = 1.0 + direct.matrix().norm();
    checks.push(Check::at_most("series_at_identity", diff(series.value.matrix(), direct.matrix()), 1e-8 * scale));
    let b = sample::positive_element(rng, n, 20.0);
    let k = sample::hermitian_with_norm(rng, n, 0.4 / b.inv().norm());
    let series = phi_series_at(&p, &b, &k, ctl)?;
    let direct = phi(&p, &PositiveElement::new(b.matrix() + &k)?)?;
    checks.push(Check::at_most(
        "series_at_base",
        diff(series.value.matrix(), direct.matrix()),
        1e-8 * (1.0 + direct.matrix().norm()),
    ));

    let oblique = sample::idempotent(rng, n, 10.0);
    let section = cross_section_checked(&oblique)?;
    checks.extend(section.checks.into_iter().map(|mut c| {
        c.name = format!("section_{}", c.name);
        c
    }));

    let x = sample::hermitian_with_norm(rng, n, 1.0);
    let id = ComplexMatrix::identity(n);
    let exact = tangent_phi_p_at_identity(&p, &x)?;
    checks.push(quadratic_fd(
        "tangent_at_identity_fd",
        |s| Ok(phi(&p, &PositiveElement::new(&id + &x.scale(s))?)?.into_matrix()),
        &exact,
    )?);
    let c = sample::positive_element(rng, n, 20.0);
    let z = sample::corner(rng, &p, 0.5);
    let dir = &z + &z.adjoint();
    let t = tangent_phi_a(&p, &c, &dir)?;
    let curve = geodesic(TangentVector::at_projection(&p, dir.clone())?);
    checks.push(quadratic_fd(
        "tangent_in_p_fd",
        |s| {
            let moved = OrthProjection::new(curve.eval(s)?.into_matrix().hermitian_part())?;
            Ok(phi(&moved, &c)?.into_matrix())
        },
        &t.full,
    )?);
    let ya = a_norm(&t.corner, &c)?;
    checks.push(Check::at_most("tangent_a_norm", (a_norm(&t.full, &c)? - ya).abs(), 1e-9 * (1.0 + ya)));
    Ok(checks)
}

fn retraction(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let p = sample::any_orth_projection(rng, n);
    let fixed = omega(&Idempotent::from(p.clone()))?;
    let q = sample::idempotent(rng, n, 9.0);
    let checked = omega_checked(&q)?;
    let mut checks = vec![Check::at_most("omega_fixes_projections", diff(fixed.matrix(), p.matrix()), 1e-12)];
    checks.extend(checked.checks.into_iter().map(|mut c| {
        c.name = format!("omega_{}", c.name);
        c
    }));

    let r = sample::any_orth_projection(rng, n);
    let a = sample::positive_element(rng, n, 1e3);
    let lifted = omega_a_inverse(&r, &a)?;
    checks.push(Check::at_most("omega_a_round_trip", diff(omega_a(&lifted, &a)?.matrix(), r.matrix()), 1e-8));
    let q2 = phi(&p, &a)?;
    let relifted = omega_a_inverse(&omega_a(&q2, &a)?, &a)?;
    checks.push(Check::at_most(
        "omega_a_inverse_round_trip",
        diff(relifted.matrix(), q2.matrix()),
        1e-8 * (1.0 + q2.matrix().norm()),
    ));

    let b = sample::positive_element(rng, n, 1e4);
    let moved = omega_phi_move_checked(&p, &b)?;
    checks.extend(moved.checks.into_iter().map(|mut c| {
        c.name = format!("move_{}", c.name);
        c
    }));
    checks.push(Check::below("move_bound", diff(moved.value.matrix(), p.matrix()), std::f64::consts::FRAC_1_SQRT_2));
    let (_, bh) = buckholtz_checked(&phi(&p, &b)?)?;
    checks.push(Check { name: "buckholtz_identity".into(), ..bh });
    Ok(checks)
}

fn geodesics(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let q = sample::idempotent(rng, n, 2.0);
    let w = sample::complex(rng, n, 1.0);
    let c = q.complement();
    let v = &(&w - &(&(q.matrix() * &w) * q.matrix())) - &(&(c.matrix() * &w) * c.matrix());
    let g = geodesic(TangentVector::new(q, v)?);
    let mut checks = Vec::new();
    for t in [0.25, 0.5, 0.75, 1.0] {
        let m = g.eval(t)?.into_matrix();
        let scale = 1.0 + m.norm() * m.norm();
        checks.push(Check::at_most("curve_idempotent", diff(&(&m * &m), &m), 1e-9 * scale));
    }
    let p = sample::any_orth_projection(rng, n);
    let z = sample::corner(rng, &p, 1.0);
    let x = &z + &z.adjoint();
    let len = rng.random::<f64>();
    let x = x.scale(len / x.norm());
    let end = geodesic(TangentVector::at_projection(&p, x.clone())?).endpoint()?;
    let back = connect(&p, &end)?;
    checks.push(Check::at_most("connect_inverts_eval", diff(back.velocity.matrix(), &x), 1e-7));
    Ok(checks)
}

struct CompatTally {
    skew_feasible: usize,
    flip_feasible: usize,
}

fn compat(rng: &mut Rng8, n: usize, seed: u64, tally: &mut CompatTally) -> Result<Vec<Check>> {
    let tol = Tolerance::new(1e-8)?;
    let skew = sample::compatible_pair(rng, n, false, 0.9);
    let v = compatible_star(&skew.p, &skew.q, seed)?;
    let mut checks = vec![Check::holds("compat_never_infeasible", v.status != Status::Infeasible)];
    if v.status == Status::Feasible {
        tally.skew_feasible += 1;
        let w = v.witness.as_ref().ok_or(Error::HypothesesViolated("feasible verdict without witness"))?;
        let sound = is_a_selfadjoint(skew.p.matrix(), w, tol) && is_a_selfadjoint(skew.q.matrix(), w, tol);
        checks.push(Check::holds("compat_witness_sound", sound));
    }
    let mirror = omega_fiber_star(&skew.p, &skew.q, seed)?;
    if let (Status::Feasible, Some(w)) = (mirror.status, mirror.witness.as_ref()) {
        let x = &mirror.exponent;
        let residual = (&(w.matrix() * x) + &(&x.adjoint() * w.matrix())).norm();
        let both = residual <= 1e-8 * w.matrix().norm() * x.norm();
        checks.push(Check::holds("sign_dichotomy", !both));
    }
    let flip = sample::compatible_pair(rng, n, true, 0.9);
    let f = omega_fiber_star(&flip.p, &flip.q, seed)?;
    checks.push(Check::holds("flip_never_infeasible", f.status != Status::Infeasible));
    if f.status == Status::Feasible {
        tally.flip_feasible += 1;
    }
    Ok(checks)
}

fn serialization(rng: &mut Rng8, n: usize) -> Result<Vec<Check>> {
    let exp = rng.random_range(-300..300);
    let m = sample::complex(rng, n, 10f64.powi(exp));
    let back = parse_matrix(print_matrix(&m, None).as_bytes())?;
    let exact = back.as_slice().iter().zip(m.as_slice()).all(|(a, b)| {
        a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
    });
    Ok(vec![Check::holds("serialization_round_trip", exact)])
}

/// Runs `cases` seeded cases of size `n`.
pub fn run(n: usize, seed: u64, cases: usize) -> Result<SuiteReport> {
    if n < 2 {
        return Err(Error::HypothesesViolated("the suite needs n >= 2"));
    }
    if cases == 0 {
        return Err(Error::HypothesesViolated("the suite needs at least one case"));
    }
    let mut rng = sample::rng(seed);
    let mut battery = Battery::default();
    let mut tally = CompatTally { skew_feasible: 0, flip_feasible: 0 };
    for case in 0..cases {
        battery.group("linalg", linalg(&mut rng, n));
        battery.group("involutions", involutions(&mut rng, n));
        battery.group("projections", projections(&mut rng, n));
        battery.group("fibration", fibration(&mut rng, n));
        battery.group("retraction", retraction(&mut rng, n));
        battery.group("geodesics", geodesics(&mut rng, n));
        let search_seed = seed.wrapping_add(case as u64);
        battery.group("compat", compat(&mut rng, n, search_seed, &mut tally));
        battery.group("serialization", serialization(&mut rng, n));
    }
    let fraction = |k: usize| k as f64 / cases as f64;
    battery.record(Check::at_most("compat_feasible_shortfall", 1.0 - fraction(tally.skew_feasible), 1.0 - MIN_FEASIBLE_FRACTION));
    battery.record(Check::at_most("flip_feasible_shortfall", 1.0 - fraction(tally.flip_feasible), 1.0 - MIN_FEASIBLE_FRACTION));
    Ok(SuiteReport {
        checks: battery.worst,
        cases,
        evaluations: battery.evaluations,
        failures: battery.failures,
    })
}
