//! Truncated Fock-space oracle for the one-mode attenuator/amplifier.
//!
//! The CJ operator is built directly from the quadratic
//! `H = (q_B − k q_A)² + (p_B + k p_A)²` on `H_B ⊗ H_A` (B-major) as
//! `Ω = c · exp(−λH)`, without going through the normal form, so it checks
//! the analytic route independently.
//!
//! `H = cc† + c†c` with `c = a_B − k a_A†`, so `H` conserves `n_B − n_A`
//! and its compression to `N` levels per mode splits into `2N − 1` blocks
//! of size at most `N`. All operators here are stored block-wise.

use nalgebra::{Complex, DMatrix};

use crate::gaussian::OneModeChannel;
use crate::matkernel::{hermitian_eig, matrix_exp_hermitian, BlockHermitian, BlockSpectrum, DenseMatrix, SparseMatrix};
use crate::{Error, Real, Result, Tolerances};

/// Smallest truncation accepted by the two-mode routines.
pub const MIN_TRUNCATION: usize = 8;

/// Position, momentum and number operators truncated to `N` levels.
#[derive(Clone, Debug)]
pub struct FockOps<T: Real> {
    pub n_levels: usize,
    pub a: DenseMatrix<T>,
    pub q: DenseMatrix<T>,
    pub p: DenseMatrix<T>,
    pub n: DenseMatrix<T>,
}

/// Ladder-operator matrices: `q = (a + a†)/√2`, `p = (a − a†)/(i√2)`,
/// `n = a†a`.
pub fn build_ops<T: Real>(n_levels: usize) -> Result<FockOps<T>> {
    if n_levels < 2 {
        return Err(Error::TruncationTooSmall { n: n_levels, min: 2 });
    }
    let mut a = DMatrix::zeros(n_levels, n_levels);
    for j in 1..n_levels {
        a[(j - 1, j)] = Complex::from(T::lit(j as f64).sqrt());
    }
    let ad = a.adjoint();
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let q = (&a + &ad).map(|z| z * s);
    // (a − a†)/(i√2) = −i(a − a†)/√2
    let p = (&a - &ad).map(|z| z * Complex::new(T::zero(), -s));
    let n = &ad * &a;
    Ok(FockOps { n_levels, a, q, p, n })
}

/// The truncated quadratic `(q_B − k q_A)² + (p_B + k p_A)²`.
#[derive(Clone, Debug)]
pub struct TwoModeQuadratic<T: Real> {
    pub k: T,
    pub n_levels: usize,
    pub h: BlockHermitian<T>,
}

impl<T: Real> TwoModeQuadratic<T> {
    pub fn spectrum(&self, tol: &Tolerances) -> Result<BlockSpectrum<T>> {
        self.h.eig(tol)
    }

    pub fn lowest_eigenvalue(&self, tol: &Tolerances) -> Result<T> {
        Ok(self.h.eig(tol)?.min())
    }
}

fn check_truncation(n_levels: usize) -> Result<()> {
    if n_levels < MIN_TRUNCATION {
        return Err(Error::TruncationTooSmall { n: n_levels, min: MIN_TRUNCATION });
    }
    Ok(())
}

/// Compression `P H P` of the quadratic onto `n_B, n_A < N`.
///
/// Squares of quadratures truncated at `N` levels are wrong on the top level,
/// which pulls the spectrum below `|k² − 1|`. Products formed at `N + 1`
/// levels are exact on the lower `N`, so restricting them gives the true
/// compression, whose eigenvalues bound the untruncated ones from above.
pub fn quad_operator<T: Real>(k: T, n_levels: usize, tol: &Tolerances) -> Result<TwoModeQuadratic<T>> {
    check_truncation(n_levels)?;
    let big = n_levels + 1;
    let ops = build_ops::<T>(big)?;
    let id = SparseMatrix::<T>::identity(big);
    let (q, p) = (SparseMatrix::from_dense(&ops.q), SparseMatrix::from_dense(&ops.p));
    let kc = Complex::from(k);
    let x = q.kron(&id).sub(&id.kron(&q).scale(kc))?;
    let y = p.kron(&id).add(&id.kron(&p).scale(kc))?;
    let full = x.mul(&x)?.add(&y.mul(&y)?)?;
    let n = n_levels;
    let mut h = SparseMatrix::zeros(n * n, n * n);
    for (r, c, v) in full.triplets() {
        let (rb, ra, cb, ca) = (r / big, r % big, c / big, c % big);
        if rb < n && ra < n && cb < n && ca < n {
            h.add_at(rb * n + ra, cb * n + ca, v);
        }
    }
    // cancellations of a² and a†² terms can leave rounding residue
    let floor = h.max_abs() * T::lit(16.0) * T::default_epsilon();
    h.prune(floor);
    Ok(TwoModeQuadratic { k, n_levels, h: BlockHermitian::from_sparse(&h, tol)? })
}

/// Extra levels per mode used by [`verify_partial_trace`] and
/// [`ppt_probe_truncated`] when compressing `Ω`.
pub const DEFAULT_GUARD: usize = 20;

/// `Ω = c · exp(−λH)` together with the spectrum of `H` it was built from.
///
/// `H` lives on `working_levels` per mode; `omega` is its image restricted
/// to the lowest `n_levels` per mode.
#[derive(Clone, Debug)]
pub struct OmegaNumeric<T: Real> {
    pub channel: OneModeChannel<T>,
    pub n_levels: usize,
    pub working_levels: usize,
    /// `1/√(m² − (k² − 1)²/4)`.
    pub prefactor: T,
    /// `ln((m + g/2)/(m − g/2))/(2g)`, `g = |k² − 1|`.
    pub lambda: T,
    pub h_spectrum: BlockSpectrum<T>,
    pub omega: BlockHermitian<T>,
}

impl<T: Real> OmegaNumeric<T> {
    /// `λ_max(Ω) = c · exp(−λ · λ_min(H))` at the working truncation.
    pub fn norm(&self) -> T {
        self.prefactor * (-self.lambda * self.h_spectrum.min()).exp()
    }

    /// `Tr_B Ω` restricted to the lowest `levels` levels of A.
    pub fn partial_trace_b(&self, levels: usize) -> DenseMatrix<T> {
        let n = self.n_levels;
        DMatrix::from_fn(levels, levels, |i, j| {
            (0..n).fold(Complex::from(T::zero()), |acc, b| acc + self.omega.get(b * n + i, b * n + j))
        })
    }
}

fn case1_channel<T: Real>(k: T, m: T, tol: &Tolerances) -> Result<OneModeChannel<T>> {
    let ch = OneModeChannel::new(k, m, tol).map_err(|e| Error::NotCase1(e.to_string()))?;
    let g = ch.gap();
    if g <= T::lit(tol.rank) {
        return Err(Error::NotCase1(format!("k = {k} gives degenerate Delta_K")));
    }
    // the pure window is on μ_j = m/g
    if m / g - T::lit(0.5) <= T::lit(tol.pure_window) {
        return Err(Error::NotCase1(format!("m = {m} is on the boundary |k^2 - 1|/2")));
    }
    Ok(ch)
}

/// `Ω = c · exp(−λH)` with `H` truncated to `N` levels per mode, so that
/// `λ_max(Ω) = c · exp(−λ λ_min(H))` holds exactly.
pub fn omega_numeric<T: Real>(k: T, m: T, n_levels: usize, tol: &Tolerances) -> Result<OmegaNumeric<T>> {
    omega_compressed(k, m, n_levels, 0, tol)
}

/// `Ω` computed with `N + guard` levels per mode and then compressed to
/// `N`. Near the truncation edge `exp(−λH)` is distorted; the guard band
/// keeps that distortion out of the returned entries.
pub fn omega_compressed<T: Real>(
    k: T,
    m: T,
    n_levels: usize,
    guard: usize,
    tol: &Tolerances,
) -> Result<OmegaNumeric<T>> {
    let channel = case1_channel(k, m, tol)?;
    check_truncation(n_levels)?;
    let big = n_levels + guard;
    let quad = quad_operator(k, big, tol)?;
    let h_spectrum = quad.spectrum(tol)?;
    let prefactor = channel.closed_form_prefactor();
    let lambda = channel.closed_form_lambda();
    let full = h_spectrum.map(|x| prefactor * (-lambda * x).exp());
    let omega = if guard == 0 {
        full
    } else {
        let n = n_levels;
        let mut small = SparseMatrix::zeros(n * n, n * n);
        for (r, c, v) in full.triplets() {
            let (rb, ra, cb, ca) = (r / big, r % big, c / big, c % big);
            if rb < n && ra < n && cb < n && ca < n {
                small.add_at(rb * n + ra, cb * n + ca, v);
            }
        }
        BlockHermitian::from_sparse(&small, tol)?
    };
    Ok(OmegaNumeric { channel, n_levels, working_levels: big, prefactor, lambda, h_spectrum, omega })
}

/// `max_{i,j < levels} |(Tr_B Ω)_{ij} − δ_ij|`, with the trace over B cut
/// at `N` levels and `Ω` compressed with [`DEFAULT_GUARD`].
pub fn verify_partial_trace<T: Real>(k: T, m: T, n_levels: usize, levels: usize, tol: &Tolerances) -> Result<T> {
    verify_partial_trace_guarded(k, m, n_levels, levels, DEFAULT_GUARD, tol)
}

pub fn verify_partial_trace_guarded<T: Real>(
    k: T,
    m: T,
    n_levels: usize,
    levels: usize,
    guard: usize,
    tol: &Tolerances,
) -> Result<T> {
    if 3 * levels > n_levels {
        return Err(Error::TruncationTooSmall { n: n_levels, min: 3 * levels });
    }
    let om = omega_compressed(k, m, n_levels, guard, tol)?;
    let tr = om.partial_trace_b(levels);
    Ok(crate::matkernel::max_diff(&tr, &DMatrix::identity(levels, levels)))
}

/// Result of [`thermal_spectrum_check`].
#[derive(Clone, Debug)]
pub struct ThermalCheck<T> {
    /// Eigenvalues of the truncated state, descending.
    pub eigenvalues: Vec<T>,
    /// Max relative deviation from `(1/(μ+½))·((μ−½)/(μ+½))^n` over the
    /// lowest `N/2` levels.
    pub max_rel_deviation: T,
    pub max_eigenvalue: T,
}

/// Builds `exp(−θ n)/Z` with `θ = ln((μ+½)/(μ−½))` and the untruncated
/// `Z = 1/(1 − e^{−θ}) = μ + ½`, and compares its spectrum with the
/// geometric law.
pub fn thermal_spectrum_check<T: Real>(mu: T, n_levels: usize, tol: &Tolerances) -> Result<ThermalCheck<T>> {
    let half = T::lit(0.5);
    if !mu.is_finite() || mu < half - T::lit(tol.pure_window) {
        return Err(Error::InvalidChannel(format!("symplectic eigenvalue {mu} is below 1/2")));
    }
    if mu - half <= T::lit(tol.pure_window) {
        return Err(Error::PureMode { mu: mu.as_f64() });
    }
    let ops = build_ops::<T>(n_levels)?;
    let theta = ((mu + half) / (mu - half)).ln();
    let z = mu + half;
    let rho = matrix_exp_hermitian(&ops.n, -theta, tol)?.map(|v| v / Complex::from(z));
    let mut eigenvalues: Vec<T> = hermitian_eig(&rho, tol)?.values.iter().copied().collect();
    eigenvalues.reverse();
    let ratio = (mu - half) / (mu + half);
    let mut worst = T::zero();
    let mut expect = T::one() / z;
    for &ev in eigenvalues.iter().take(n_levels / 2) {
        worst = worst.max(((ev - expect) / expect).abs());
        expect *= ratio;
    }
    let max_eigenvalue = eigenvalues[0];
    Ok(ThermalCheck { eigenvalues, max_rel_deviation: worst, max_eigenvalue })
}

/// Truncated thermal distribution `p_n ∝ (n̄/(n̄+1))^n`, renormalized on
/// `N` levels. `n̄ = 0` gives the vacuum.
pub fn thermal_populations<T: Real>(mean: T, n_levels: usize) -> Vec<T> {
    let r = mean / (mean + T::one());
    let mut p: Vec<T> = (0..n_levels).map(|n| r.powi(n as i32)).collect();
    let total = p.iter().fold(T::zero(), |a, &b| a + b);
    for v in &mut p {
        *v /= total;
    }
    p
}

/// Minimum eigenvalue of the A-partial transpose of
/// `(I ⊗ σ^{1/2}) Ω (I ⊗ σ^{1/2})` with a truncated thermal `σ`.
///
/// The partial transpose conserves `n_B + n_A`, so it is diagonalized
/// block-wise as well.
pub fn ppt_probe_truncated<T: Real>(k: T, m: T, sigma_mean: T, n_levels: usize, tol: &Tolerances) -> Result<T> {
    if !sigma_mean.is_finite() || sigma_mean < T::zero() {
        return Err(Error::InvalidDensity(format!("thermal mean {sigma_mean}")));
    }
    let om = omega_compressed(k, m, n_levels, DEFAULT_GUARD, tol)?;
    let n = n_levels;
    let root: Vec<T> = thermal_populations(sigma_mean, n).into_iter().map(|x| x.sqrt()).collect();
    let d: Vec<T> = (0..n * n).map(|g| root[g % n]).collect();
    let state = om.omega.conjugate_by_diagonal(&d)?;
    let mut pt = SparseMatrix::zeros(n * n, n * n);
    for (r, c, v) in state.triplets() {
        let (kb, i) = (r / n, r % n);
        let (lb, j) = (c / n, c % n);
        pt.add_at(kb * n + j, lb * n + i, v);
    }
    Ok(BlockHermitian::from_sparse(&pt, tol)?.eig(tol)?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::partial_trace_b;
    use crate::matkernel::max_diff;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn ops_small() {
        let ops = build_ops::<f64>(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(ops.q[(0, 1)].re, s, epsilon = 1e-16);
        assert_abs_diff_eq!(ops.q[(1, 0)].re, s, epsilon = 1e-16);
        assert_eq!(ops.q[(0, 0)], Complex::from(0.0));
        assert!(matches!(build_ops::<f64>(1), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn ops_invariants() {
        for n in [3, 10, 25] {
            let ops = build_ops::<f64>(n).unwrap();
            let ev = hermitian_eig(&ops.n, &tol()).unwrap().values;
            for (j, v) in ev.iter().enumerate() {
                assert_abs_diff_eq!(*v, j as f64, epsilon = 1e-12);
            }
            assert!(max_diff(&ops.q, &ops.q.adjoint()) < 1e-15);
            assert!(max_diff(&ops.p, &ops.p.adjoint()) < 1e-15);
            assert_abs_diff_eq!((&ops.q * &ops.q)[(0, 0)].re, 0.5, epsilon = 1e-15);
            let comm = &ops.q * &ops.p - &ops.p * &ops.q;
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    let expect = if i == j { Complex::new(0.0, 1.0) } else { Complex::from(0.0) };
                    assert!((comm[(i, j)] - expect).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn quadratic_block_structure() {
        let n = 12;
        let quad = quad_operator(2.0f64, n, &tol()).unwrap();
        assert_eq!(quad.h.blocks().len(), 2 * n - 1);
        assert_eq!(quad.h.largest_block(), n);
        // H = cc† + c†c with c = a_B − k a_A†, formed on n + 1 levels and
        // then restricted to the lowest n per mode
        let big = n + 1;
        let ops = build_ops::<f64>(big).unwrap();
        let id = DMatrix::identity(big, big);
        let c = ops.a.kronecker(&id) - id.kronecker(&ops.a.adjoint()).scale(2.0);
        let h = &c * c.adjoint() + c.adjoint() * &c;
        let h = DMatrix::from_fn(n * n, n * n, |r, q| h[((r / n) * big + r % n, (q / n) * big + q % n)]);
        assert!(max_diff(&quad.h.to_dense(), &h) < 1e-12);
    }

    #[test]
    fn quadratic_lowest_eigenvalues() {
        let t = tol();
        let q0 = quad_operator(0.0f64, 10, &t).unwrap();
        assert_abs_diff_eq!(q0.lowest_eigenvalue(&t).unwrap(), 1.0, epsilon = 1e-12);
        let q2 = quad_operator(2.0f64, 30, &t).unwrap();
        assert_abs_diff_eq!(q2.lowest_eigenvalue(&t).unwrap(), 3.0, epsilon = 1e-3);
        let a = quad_operator(1.0f64, 20, &t).unwrap().lowest_eigenvalue(&t).unwrap();
        let b = quad_operator(1.0f64, 40, &t).unwrap().lowest_eigenvalue(&t).unwrap();
        assert!(b < a && b < 0.2, "k = 1: {a} -> {b}");
        assert!(matches!(quad_operator(2.0f64, 4, &t), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn omega_norm_examples() {
        let t = tol();
        let om = omega_numeric(2.0f64, 3.0, 30, &t).unwrap();
        assert!((om.norm() - 1.0 / 4.5).abs() < 1e-3);
        // independent re-diagonalization of Ω
        let direct = om.omega.eig(&t).unwrap().max();
        assert!((direct - om.norm()).abs() < 1e-14);
        let om = omega_numeric(0.5f64, 1.0, 40, &t).unwrap();
        assert!((om.norm() - 1.0 / 1.375).abs() < 1e-3);
    }

    #[test]
    fn omega_rejects_non_case1() {
        let t = tol();
        assert!(matches!(omega_numeric(2.0f64, 1.5, 20, &t), Err(Error::NotCase1(_))));
        assert!(matches!(omega_numeric(1.0f64, 1.0, 20, &t), Err(Error::NotCase1(_))));
        assert!(matches!(omega_numeric(2.0f64, 1.0, 20, &t), Err(Error::NotCase1(_))));
        assert!(matches!(omega_numeric(2.0f64, 3.0, 5, &t), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn partial_trace_matches_choi_convention() {
        let t = tol();
        let n = 10;
        let om = omega_numeric(2.0f64, 3.0, n, &t).unwrap();
        let dense = om.omega.to_dense();
        let via_choi = partial_trace_b(&dense, n, n);
        let via_oracle = om.partial_trace_b(n);
        assert!(max_diff(&via_choi, &via_oracle) < 1e-14);
    }

    #[test]
    fn partial_trace_examples() {
        let t = tol();
        let d40 = verify_partial_trace(2.0f64, 3.0, 40, 5, &t).unwrap();
        let d60 = verify_partial_trace(2.0f64, 3.0, 60, 5, &t).unwrap();
        assert!(d60 <= 5e-3 && d60 < d40, "{d40} {d60}");
        assert!(verify_partial_trace(0.8f64, 0.5, 60, 5, &t).unwrap() <= 5e-3);
        assert!(matches!(verify_partial_trace(2.0f64, 3.0, 12, 5, &t), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn guard_keeps_inner_entries() {
        let t = tol();
        let a = omega_compressed(1.5f64, 2.0, 12, 10, &t).unwrap();
        let b = omega_compressed(1.5f64, 2.0, 12, 30, &t).unwrap();
        assert_eq!(a.working_levels, 22);
        assert!(max_diff(&a.omega.to_dense(), &b.omega.to_dense()) < 1e-6);
    }

    #[test]
    fn thermal_examples() {
        let t = tol();
        let c = thermal_spectrum_check(1.0f64, 60, &t).unwrap();
        assert!(c.max_rel_deviation <= 1e-10);
        assert_abs_diff_eq!(c.eigenvalues[1], 2.0 / 9.0, epsilon = 1e-14);
        assert!(matches!(thermal_spectrum_check(0.5f64 + 1e-9, 60, &t), Err(Error::PureMode { .. })));
        let c = thermal_spectrum_check(5.0f64, 60, &t).unwrap();
        assert_abs_diff_eq!(c.max_eigenvalue, 1.0 / 5.5, epsilon = 1e-12);
    }

    #[test]
    fn ppt_vacuum_reference_is_product() {
        // σ = |0⟩⟨0| makes the state Φ(|0⟩⟨0|) ⊗ |0⟩⟨0|, which is PPT
        let t = tol();
        let lo = ppt_probe_truncated(2.0f64, 2.0, 0.0, 16, &t).unwrap();
        assert!(lo >= -1e-12, "{lo}");
    }
}
