mod common;

use gausscj::choi::{apply_channel, kraus_from_choi, ChannelBlocks, ChoiMatrix, DensityMatrix};
use gausscj::ebreak::{ppt_min_eigenvalue, separable_choi};
use gausscj::fock::{omega_numeric, quad_operator, thermal_spectrum_check};
use gausscj::gaussian::{cj_norm, classify, CjCase, CjNorm};
use gausscj::matkernel::{hermitian_eig, max_diff, operator_norm};
use gausscj::symplectic::{williamson, GaussianChannelSpec};
use gausscj::{sample, Tolerances};

fn tol() -> Tolerances {
    Tolerances::single_precision()
}

#[test]
fn eig_f32() {
    let m = sample::hermitian::<f32, _>(&mut common::rng(1), 12);
    let eig = hermitian_eig(&m, &tol()).unwrap();
    assert!(operator_norm(&(eig.map_spectrum(|x| x) - &m)) <= 1e-5 * operator_norm(&m));
}

#[test]
fn choi_f32() {
    let t = tol();
    let k = sample::kraus_set::<f32, _>(&mut common::rng(2), 3, 2, 3).unwrap();
    let c = ChoiMatrix::from_blocks(&ChannelBlocks::from_kraus(&k, &t).unwrap(), &t).unwrap();
    let k2 = kraus_from_choi(&c, &t).unwrap();
    assert!(k2.completeness_residual() <= 1e-5);
    let rho = DensityMatrix::<f32>::maximally_mixed(3, &t).unwrap();
    assert!((apply_channel(&c, &rho, &t).unwrap().matrix().trace().re - 1.0).abs() <= 1e-5);
}

#[test]
fn separable_f32() {
    let t = tol();
    let eb = sample::eb_channel::<f32, _>(&mut common::rng(3), 3, 3, 4, &t).unwrap();
    let c = separable_choi(&eb, &t).unwrap();
    assert!(c.norm(&t).unwrap() <= 1.0 + 1e-5);
    assert!(ppt_min_eigenvalue(c.matrix(), 3, 3, &t).unwrap() >= -1e-5);
}

#[test]
fn gaussian_f32() {
    let t = tol();
    let spec = GaussianChannelSpec::<f32>::one_mode(2.0, 3.0, &t).unwrap();
    let cls = classify(&spec, &t).unwrap();
    assert_eq!(cls.case, CjCase::Case1);
    let CjNorm::Exact(v) = cj_norm(&spec, &t).unwrap() else { panic!("expected exact norm") };
    assert!((v - 1.0 / 4.5).abs() <= 1e-6);

    let pair = sample::williamson_pair::<f32, _>(&mut common::rng(4), 3);
    let w = williamson(&pair.mu, &pair.delta_k, &t).unwrap();
    assert_eq!(w.dims, pair.dims);
    let tt = &w.t;
    assert!(max_diff(&(tt.transpose() * &pair.mu * tt), &w.mu_normal_form()) <= 1e-4);
}

#[test]
fn fock_f32() {
    let t = tol();
    let lo = quad_operator(2.0f32, 30, &t).unwrap().lowest_eigenvalue(&t).unwrap();
    assert!((lo - 3.0).abs() <= 1e-3);
    let om = omega_numeric(2.0f32, 3.0, 30, &t).unwrap();
    assert!((om.norm() - 1.0 / 4.5).abs() <= 1e-3);
    let th = thermal_spectrum_check(1.0f32, 30, &t).unwrap();
    assert!(th.max_rel_deviation <= 1e-4);
}
