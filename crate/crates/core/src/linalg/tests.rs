use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::sample;

fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
    let err = (a - b).max_abs();
    assert!(err <= tol, "entrywise error {err:e} > {tol:e}\n{a:?}\n{b:?}");
}

#[test]
fn op_norm_examples() {
    assert_eq!(op_norm(&ComplexMatrix::identity(3)).unwrap(), 1.0);
    assert_eq!(op_norm(&ComplexMatrix::zeros(2)).unwrap(), 0.0);
    // singular values of [[0,2],[0,0]] are {2, 0}
    let j = ComplexMatrix::real(&[0.0, 2.0, 0.0, 0.0]);
    assert!((op_norm(&j).unwrap() - 2.0).abs() < 1e-15);
}

#[test]
fn op_norm_rejects_nan() {
    let mut m = ComplexMatrix::identity(2);
    m[(0, 1)] = c64(f64::NAN, 0.0);
    assert_eq!(op_norm(&m), Err(Error::NonFinite));
    assert_eq!(
        ComplexMatrix::new(1, vec![c64(f64::INFINITY, 0.0)]).unwrap_err(),
        Error::NonFinite
    );
}

#[test]
fn herm_eig_examples() {
    let e = herm_eig(&ComplexMatrix::diag_real(&[2.0, 1.0])).unwrap();
    assert_eq!(e.values, vec![1.0, 2.0]);
    // V is a permutation here
    assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
    assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);

    // characteristic polynomial l^2 - 1
    let e = herm_eig(&ComplexMatrix::real(&[0.0, 1.0, 1.0, 0.0])).unwrap();
    assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);

    let e = herm_eig(&ComplexMatrix::identity(4)).unwrap();
    assert_eq!(e.values, vec![1.0; 4]);
}

#[test]
fn herm_eig_rejects_non_hermitian() {
    let m = ComplexMatrix::real(&[1.0, 1.0, 0.0, 1.0]);
    assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
}

#[test]
fn herm_eig_reconstructs_random_complex() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3, 5, 8] {
        let h = sample::hermitian(&mut rng, n, 3.0);
        let e = herm_eig(&h).unwrap();
        let v = &e.vectors;
        assert_close(&(&v.adjoint() * v), &ComplexMatrix::identity(n), 1e-13);
        assert_close(&e.map(|l| l), &h, 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn herm_sqrt_examples() {
    let s = herm_sqrt(&ComplexMatrix::diag_real(&[4.0, 9.0])).unwrap();
    assert_close(&s, &ComplexMatrix::diag_real(&[2.0, 3.0]), 1e-15);
    let s = herm_sqrt(&ComplexMatrix::identity(3)).unwrap();
    assert_close(&s, &ComplexMatrix::identity(3), 1e-15);
    // eigenvalues {1, 3}; reassembled square
    let m = ComplexMatrix::real(&[2.0, 1.0, 1.0, 2.0]);
    let s = herm_sqrt(&m).unwrap();
    assert_close(&(&s * &s), &m, 1e-12);
    let r3 = 3f64.sqrt();
    let expected = ComplexMatrix::real(&[(1.0 + r3) / 2.0, (r3 - 1.0) / 2.0, (r3 - 1.0) / 2.0, (1.0 + r3) / 2.0]);
    assert_close(&s, &expected, 1e-14);
}

#[test]
fn herm_sqrt_rejects_indefinite() {
    let m = ComplexMatrix::diag_real(&[1.0, -1.0]);
    assert!(matches!(herm_sqrt(&m), Err(Error::NotPsd(_))));
}

#[test]
fn mat_exp_examples() {
    assert_close(&mat_exp(&ComplexMatrix::zeros(3)).unwrap(), &ComplexMatrix::identity(3), 0.0);
    let t = 0.7;
    let e = mat_exp(&ComplexMatrix::real(&[0.0, t, 0.0, 0.0])).unwrap();
    assert_close(&e, &ComplexMatrix::real(&[1.0, t, 0.0, 1.0]), 1e-15);
    let e = mat_exp(&ComplexMatrix::diag_real(&[1.0, -1.0])).unwrap();
    let expected = ComplexMatrix::diag_real(&[std::f64::consts::E, 1.0 / std::f64::consts::E]);
    assert_close(&e, &expected, 1e-14);
}

#[test]
fn mat_exp_rotation_generator() {
    // exp(theta [[0,-1],[1,0]]) is the rotation by theta
    let th = 2.3;
    let e = mat_exp(&ComplexMatrix::real(&[0.0, -th, th, 0.0])).unwrap();
    let (s, c) = th.sin_cos();
    assert_close(&e, &ComplexMatrix::real(&[c, -s, s, c]), 1e-14);
}

#[test]
fn mat_log_examples() {
    assert_close(
        &mat_log_near_identity(&ComplexMatrix::identity(3)).unwrap(),
        &ComplexMatrix::zeros(3),
        0.0,
    );
    let t = 0.6;
    let l = mat_log_near_identity(&ComplexMatrix::real(&[1.0, t, 0.0, 1.0])).unwrap();
    assert_close(&l, &ComplexMatrix::real(&[0.0, t, 0.0, 0.0]), 1e-15);
    let l = mat_log_near_identity(&ComplexMatrix::diag_real(&[1.5, 0.8])).unwrap();
    assert_close(&l, &ComplexMatrix::diag_real(&[1.5f64.ln(), 0.8f64.ln()]), 1e-14);
}

#[test]
fn mat_log_domain_error() {
    let v = ComplexMatrix::diag_real(&[2.0, 1.0]);
    assert!(matches!(mat_log_near_identity(&v), Err(Error::LogDomain(_))));
}

#[test]
fn polar_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = sample::unitary(&mut rng, 3);
    let pd = polar(&u).unwrap();
    assert_close(&pd.unitary, &u, 1e-13);
    assert_close(&pd.positive, &ComplexMatrix::identity(3), 1e-13);

    let a = sample::positive(&mut rng, 3, 50.0);
    let pd = polar(&a).unwrap();
    assert_close(&pd.unitary, &ComplexMatrix::identity(3), 1e-12);
    assert_close(&pd.positive, &a, 1e-12);

    // [[1,1],[0,-1]] squares to I, so its unitary factor is a Hermitian unitary
    let c = ComplexMatrix::real(&[1.0, 1.0, 0.0, -1.0]);
    let pd = polar(&c).unwrap();
    let rho = &pd.unitary;
    assert_close(&(rho * rho), &ComplexMatrix::identity(2), 1e-14);
    assert_close(rho, &rho.adjoint(), 1e-14);
    assert_close(&(rho * &pd.positive), &c, 1e-14);
}

#[test]
fn polar_matches_square_root_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [1, 2, 4, 6] {
        let c = sample::with_condition(&mut rng, n, 30.0);
        let lambda = herm_sqrt(&(&c.adjoint() * &c)).unwrap();
        let rho = &c * &inverse(&lambda).unwrap();
        let pd = polar(&c).unwrap();
        assert_close(&pd.unitary, &rho, 1e-11);
        assert_close(&pd.positive, &lambda, 1e-11);
    }
}

#[test]
fn polar_rejects_singular() {
    let c = ComplexMatrix::real(&[1.0, 1.0, 1.0, 1.0]);
    assert_eq!(polar(&c).unwrap_err(), Error::Singular);
}

#[test]
fn inverse_examples() {
    assert_close(&inverse(&ComplexMatrix::identity(3)).unwrap(), &ComplexMatrix::identity(3), 0.0);
    assert_close(
        &inverse(&ComplexMatrix::diag_real(&[2.0, 4.0])).unwrap(),
        &ComplexMatrix::diag_real(&[0.5, 0.25]),
        0.0,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let m = sample::complex(&mut rng, 4, 1.0);
    let r = &m * &inverse(&m).unwrap() - ComplexMatrix::identity(4);
    assert!(r.norm() < 1e-10);
    assert_eq!(inverse(&ComplexMatrix::zeros(2)).unwrap_err(), Error::Singular);
}

#[test]
fn positive_definite_examples() {
    assert!(is_positive_definite(&ComplexMatrix::identity(2)));
    assert!(!is_positive_definite(&ComplexMatrix::diag_real(&[1.0, -1.0])));
    // eigenvalues (3 +- sqrt 5)/2
    assert!(is_positive_definite(&ComplexMatrix::real(&[2.0, 1.0, 1.0, 1.0])));
    assert!(!is_positive_definite(&ComplexMatrix::real(&[1.0, 1.0, 0.0, 1.0])));
}

#[test]
fn tolerance_rejects_nonpositive() {
    assert!(Tolerance::new(0.0).is_err());
    assert!(Tolerance::new(-1.0).is_err());
    assert_eq!(Tolerance::default().atol(), 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample::complex(&mut rng, n, 2.0);
        let m = &g.adjoint() * &g;
        let s = herm_sqrt(&m).unwrap();
        prop_assert!((&(&s * &s) - &m).norm() <= 1e-10 * (1.0 + m.norm()));
    }

    #[test]
    fn exp_inverts_log(seed in any::<u64>(), n in 1usize..6, r in 0.0f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = sample::complex(&mut rng, n, 1.0);
        let h = h.scale(r / h.norm().max(1e-300));
        let v = &ComplexMatrix::identity(n) + &h;
        let l = mat_log_near_identity(&v).unwrap();
        let back = mat_exp(&l).unwrap();
        prop_assert!((&back - &v).norm() <= 1e-9);
    }

    #[test]
    fn polar_factors(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = sample::with_condition(&mut rng, n, 1e4);
        let pd = polar(&c).unwrap();
        let id = ComplexMatrix::identity(n);
        let cn = c.norm();
        prop_assert!((&(&pd.unitary.adjoint() * &pd.unitary) - &id).norm() <= 1e-9);
        prop_assert!((&(&pd.unitary * &pd.positive) - &c).norm() <= 1e-9 * cn);
    }

    #[test]
    fn norm_submultiplicative(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::complex(&mut rng, n, 3.0);
        let b = sample::complex(&mut rng, n, 3.0);
        prop_assert!((&a * &b).norm() <= a.norm() * b.norm() + 1e-12);
    }
}
