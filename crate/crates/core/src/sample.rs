//! Random test objects: unitaries, states, channels, POVMs and valid
//! Gaussian noise pairs.
//!
//! Everything is drawn in `f64` from standard normals and then converted, so
//! a seeded generator produces the same objects for `f32` and `f64`.

use nalgebra::{Complex, ComplexField, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::choi::{DensityMatrix, KrausSet};
use crate::ebreak::{EbChannel, FinitePovm, PreparationEnsemble};
use crate::matkernel::{hermitian_eig, DenseMatrix, RealMatrix};
use crate::{Real, Result, Tolerances};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with i.i.d. `N(0, ½) + i N(0, ½)` entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(T::lit(s * normal(rng)), T::lit(s * normal(rng))))
}

/// Real matrix with i.i.d. standard normal entries.
pub fn real_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RealMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| T::lit(normal(rng)))
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseMatrix<T> {
    let g = ginibre::<T, _>(rng, n, n);
    (&g + g.adjoint()).scale(T::lit(0.5))
}

/// Isometry `V: C^cols → C^rows` (`V†V = I`), Haar distributed.
pub fn isometry<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre::<T, _>(rng, rows, cols).qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phases of R's diagonal so the distribution is Haar
    let mut q = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let m = d.modulus();
        if m > T::zero() {
            let phase = d / Complex::from(m);
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseMatrix<T> {
    isometry(rng, n, n)
}

/// Full-rank random state `GG†/Tr(GG†)`.
pub fn density_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, tol: &Tolerances) -> Result<DensityMatrix<T>> {
    let g = ginibre::<T, _>(rng, n, n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m.map(|z| z / tr), tol)
}

/// Channel with `rank` Kraus operators from a random Stinespring isometry.
pub fn kraus_set<T: Real, R: Rng + ?Sized>(rng: &mut R, d_a: usize, d_b: usize, rank: usize) -> Result<KrausSet<T>> {
    if d_b * rank < d_a {
        return Err(crate::Error::DimensionMismatch(format!(
            "{rank} Kraus operators into dimension {d_b} cannot be complete on dimension {d_a}"
        )));
    }
    let v = isometry::<T, _>(rng, d_b * rank, d_a);
    let ops = (0..rank).map(|l| v.rows(l * d_b, d_b).into_owned()).collect();
    KrausSet::new(ops)
}

/// Random `outcomes`-element POVM `S^{-1/2} A_α S^{-1/2}` with `S = Σ A_α`.
pub fn povm<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    outcomes: usize,
    tol: &Tolerances,
) -> Result<FinitePovm<T>> {
    let raw: Vec<DenseMatrix<T>> = (0..outcomes)
        .map(|_| {
            let g = ginibre::<T, _>(rng, d, d);
            &g * g.adjoint()
        })
        .collect();
    let s = raw.iter().fold(DMatrix::zeros(d, d), |acc, a| acc + a);
    let s_inv_half = hermitian_eig(&s, tol)?.map_spectrum(|x| T::one() / x.sqrt());
    let elements = raw.iter().map(|a| &s_inv_half * a * &s_inv_half).collect();
    FinitePovm::new(elements, tol)
}

/// Measure-and-prepare channel with a random POVM and random states.
pub fn eb_channel<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    d_a: usize,
    d_b: usize,
    outcomes: usize,
    tol: &Tolerances,
) -> Result<EbChannel<T>> {
    let povm = povm(rng, d_a, outcomes, tol)?;
    let states = (0..outcomes).map(|_| density_matrix(rng, d_b, tol)).collect::<Result<Vec<_>>>()?;
    EbChannel::new(povm, PreparationEnsemble::new(states)?)
}

/// A valid pair `(μ, Δ_K)` with prescribed structure, hidden behind a
/// random well-conditioned congruence `M`.
#[derive(Clone, Debug)]
pub struct WilliamsonPair<T: Real> {
    pub mu: RealMatrix<T>,
    pub delta_k: RealMatrix<T>,
    /// `(d₁, d₂, d₃, d₄)`.
    pub dims: [usize; 4],
    /// Mixed-mode symplectic eigenvalues, descending.
    pub mixed: Vec<T>,
}

/// Real orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealMatrix<f64> {
    let qr = real_gaussian::<f64, _>(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q₁ · diag(e^{u_i}) · Q₂` with `u_i ∈ [−½, ½]`: condition number below e.
fn conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RealMatrix<f64> {
    let d = nalgebra::DVector::from_fn(n, |_, _| rng.random_range(-0.5..0.5f64).exp());
    orthogonal(rng, n) * DMatrix::from_diagonal(&d) * orthogonal(rng, n)
}

/// Draws a pair on `s` modes. The split into mixed modes, pure modes and the
/// two degenerate blocks is random; mixed eigenvalues lie in `[0.6, 3)`.
pub fn williamson_pair<T: Real, R: Rng + ?Sized>(rng: &mut R, s: usize) -> WilliamsonPair<T> {
    let n = 2 * s;
    let modes = rng.random_range(0..=s);
    let n_mixed = rng.random_range(0..=modes);
    let n_pure = modes - n_mixed;
    let rest = n - 2 * modes;
    let d3 = rng.random_range(0..=rest);
    let dims = [2 * n_mixed, 2 * n_pure, d3, rest - d3];

    let mut mixed: Vec<f64> = (0..n_mixed).map(|_| rng.random_range(0.6..3.0)).collect();
    mixed.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut mu = DMatrix::<f64>::zeros(n, n);
    let mut delta = DMatrix::<f64>::zeros(n, n);
    for (j, m) in mixed.iter().copied().chain(std::iter::repeat_n(0.5, n_pure)).enumerate() {
        mu[(2 * j, 2 * j)] = m;
        mu[(2 * j + 1, 2 * j + 1)] = m;
        delta[(2 * j, 2 * j + 1)] = -1.0;
        delta[(2 * j + 1, 2 * j)] = 1.0;
    }
    for i in 2 * modes..2 * modes + d3 {
        mu[(i, i)] = 0.5;
    }
    let m = conditioned(rng, n);
    let mu = m.transpose() * mu * &m;
    let delta = m.transpose() * delta * &m;
    WilliamsonPair {
        mu: mu.map(T::lit),
        delta_k: delta.map(T::lit),
        dims,
        mixed: mixed.into_iter().map(T::lit).collect(),
    }
}

/// Random Gaussian channel: `K` Gaussian with entries scaled by `k_scale`,
/// `μ = |(i/2)Δ_K| + extra · GGᵗ/(2s_B)`, which satisfies the admissibility
/// constraint by construction (with equality when `extra = 0`).
pub fn gaussian_spec<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    s_a: usize,
    s_b: usize,
    k_scale: f64,
    extra: f64,
    tol: &Tolerances,
) -> Result<crate::symplectic::GaussianChannelSpec<T>> {
    use crate::symplectic::{delta_k, GaussianChannelSpec};
    let nb = 2 * s_b;
    let k = real_gaussian::<f64, _>(rng, 2 * s_a, nb).scale(k_scale);
    let probe = GaussianChannelSpec::new(s_a, s_b, k.clone(), DMatrix::zeros(nb, nb), tol)?;
    let dk = delta_k(&probe);
    let h = crate::matkernel::to_complex(&dk).map(|z| Complex::new(0.0, 0.5) * z);
    let abs = hermitian_eig(&h, tol)?.map_spectrum(f64::abs).map(|z| z.re);
    let g = real_gaussian::<f64, _>(rng, nb, nb);
    let mu = abs + (&g * g.transpose()).scale(extra / nb as f64);
    let mu = (&mu + mu.transpose()).scale(0.5);
    GaussianChannelSpec::new(s_a, s_b, k.map(T::lit), mu.map(T::lit), tol)
}
