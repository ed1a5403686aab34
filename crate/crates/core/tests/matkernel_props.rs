mod common;

use gausscj::matkernel::{hermitian_eig, identity, matrix_exp_hermitian, max_diff, operator_norm, rank_with_tolerance};
use gausscj::{sample, Tolerances};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..=64) {
        let tol = Tolerances::default();
        let m = sample::hermitian::<f64, _>(&mut common::rng(seed), n);
        let eig = hermitian_eig(&m, &tol).unwrap();
        let rec = eig.map_spectrum(|x| x);
        prop_assert!(operator_norm(&(rec - &m)) <= 1e-9 * operator_norm(&m));
        let gram = eig.vectors.adjoint() * &eig.vectors;
        prop_assert!(max_diff(&gram, &identity(n)) <= 1e-10);
        prop_assert!(eig.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exp_inverse(seed in any::<u64>(), n in 1usize..=24, scale in 0.1f64..8.0) {
        let tol = Tolerances::default();
        let m = sample::hermitian::<f64, _>(&mut common::rng(seed), n);
        let m = m.scale(scale / operator_norm(&m));
        let prod = matrix_exp_hermitian(&m, 1.0, &tol).unwrap() * matrix_exp_hermitian(&m, -1.0, &tol).unwrap();
        prop_assert!(max_diff(&prod, &identity(n)) <= 1e-8);
    }

    // both factors have norm up to e^‖M‖, so rounding alone leaves about
    // eps·e^{2‖M‖} in the product
    #[test]
    fn exp_inverse_rounding_floor(seed in any::<u64>(), n in 1usize..=24, scale in 8.0f64..=10.0) {
        let tol = Tolerances::default();
        let m = sample::hermitian::<f64, _>(&mut common::rng(seed), n);
        let m = m.scale(scale / operator_norm(&m));
        let prod = matrix_exp_hermitian(&m, 1.0, &tol).unwrap() * matrix_exp_hermitian(&m, -1.0, &tol).unwrap();
        let floor = 4.0 * n as f64 * f64::EPSILON * (2.0 * scale).exp();
        prop_assert!(max_diff(&prod, &identity(n)) <= floor);
    }

    #[test]
    fn rank_unitarily_invariant(seed in any::<u64>(), n in 2usize..=12, r in 0usize..=12) {
        let r = r.min(n);
        let mut g = common::rng(seed);
        let a = sample::ginibre::<f64, _>(&mut g, n, r);
        let m = &a * a.adjoint();
        let u = sample::unitary::<f64, _>(&mut g, n);
        let conj = &u * &m * u.adjoint();
        let r0 = rank_with_tolerance(&m, 1e-9).unwrap();
        prop_assert_eq!(r0, r);
        prop_assert_eq!(rank_with_tolerance(&conj, 1e-9).unwrap(), r0);
    }
}
