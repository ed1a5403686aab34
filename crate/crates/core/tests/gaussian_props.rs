use gausscj::gaussian::{case1_exponent, cj_norm, classify, one_mode_report, CjCase, CjNorm, OneModeChannel};
use gausscj::matkernel::rank_above;
use gausscj::symplectic::GaussianChannelSpec;
use gausscj::Tolerances;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn gap(k: f64) -> f64 {
    (k * k - 1.0).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generic_norm_matches_one_mode_law(k in 0.0f64..3.0, delta in 1e-3f64..5.0) {
        prop_assume!((k - 1.0).abs() > 1e-2);
        let tol = Tolerances::default();
        let m = gap(k) / 2.0 + delta;
        let spec = GaussianChannelSpec::<f64>::one_mode(k, m, &tol).unwrap();
        let CjNorm::Exact(v) = cj_norm(&spec, &tol).unwrap() else { panic!("expected exact norm") };
        prop_assert!((v - 1.0 / (m + gap(k) / 2.0)).abs() <= 1e-12);
    }

    #[test]
    fn gibbs_prefactor_identity(a in 0.51f64..4.0, b in 0.51f64..4.0, x in -0.5f64..0.5) {
        // two modes with symplectic eigenvalues a, b behind a shear
        let tol = Tolerances::default();
        let mut sh = DMatrix::<f64>::identity(4, 4);
        sh[(0, 2)] = x;
        sh[(3, 1)] = -x;
        let mu = sh.transpose() * DMatrix::from_diagonal(&nalgebra::dvector![a, a, b, b]) * &sh;
        // K = 0 makes Δ_K = Δ_B
        let spec = GaussianChannelSpec::<f64>::new(1, 2, DMatrix::zeros(2, 4), mu, &tol).unwrap();
        let c1 = case1_exponent(&spec, &tol).unwrap();
        let lhs = c1.sympl_eigs.iter().fold(c1.gibbs_prefactor, |acc, &m| acc * ((m - 0.5) / (m + 0.5)).sqrt());
        let rhs = c1.sympl_eigs.iter().fold(1.0, |acc, &m| acc / (m + 0.5));
        prop_assert!((lhs - rhs).abs() <= 1e-12);
        let CjNorm::Exact(v) = cj_norm(&spec, &tol).unwrap() else { panic!("expected exact norm") };
        prop_assert!((v - rhs).abs() <= 1e-10);
    }

    #[test]
    fn norm_nonincreasing_in_m(k in 0.0f64..3.0, base in 0.0f64..2.0, step in 1e-3f64..1.0) {
        let tol = Tolerances::default();
        let m0 = gap(k) / 2.0 + base;
        let n0 = cj_norm(&GaussianChannelSpec::<f64>::one_mode(k, m0, &tol).unwrap(), &tol).unwrap();
        let n1 = cj_norm(&GaussianChannelSpec::<f64>::one_mode(k, m0 + step, &tol).unwrap(), &tol).unwrap();
        match (n0.value(), n1.value()) {
            (Some(a), Some(b)) => prop_assert!(b <= a + 1e-12),
            (None, _) => {}
            (Some(_), None) => prop_assert!(false, "norm became unbounded as m grew"),
        }
    }

    #[test]
    fn bounded_iff_mu_full_rank(k in 0.0f64..2.5, m in 0.0f64..3.0, rank in 0usize..=2) {
        let tol = Tolerances::default();
        let mut mu = DMatrix::<f64>::zeros(2, 2);
        for i in 0..rank {
            mu[(i, i)] = m.max(gap(k) / 2.0) + 0.1;
        }
        let kk = DMatrix::<f64>::identity(2, 2).scale(k);
        let spec = GaussianChannelSpec::<f64>::new(1, 1, kk, mu.clone(), &tol).unwrap();
        let Ok(cls) = classify(&spec, &tol) else { return Ok(()) };
        prop_assert_eq!(cls.bounded, rank_above(&mu, 1e-9).unwrap() == 2);
        prop_assert_eq!(cls.bounded, cls.norm != CjNorm::Unbounded);
    }

    #[test]
    fn eb_implies_norm_at_most_one(k in 0.0f64..3.0, extra in 0.0f64..3.0) {
        let tol = Tolerances::default();
        let m = (k * k + 1.0) / 2.0 + extra;
        let ch = OneModeChannel::new(k, m, &tol).unwrap();
        let rep = one_mode_report(&ch, &tol).unwrap();
        prop_assert!(rep.entanglement_breaking);
        prop_assert!(rep.norm.value().unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn one_mode_case_labels(k in 0.0f64..3.0, delta in 0.0f64..2.0) {
        prop_assume!((k - 1.0).abs() > 1e-3);
        let tol = Tolerances::default();
        let m = gap(k) / 2.0 + delta;
        let rep = one_mode_report(&OneModeChannel::new(k, m, &tol).unwrap(), &tol).unwrap();
        let expect = if delta <= 1e-7 { CjCase::Case2 } else { CjCase::Case1 };
        prop_assert_eq!(rep.case, expect);
    }
}
