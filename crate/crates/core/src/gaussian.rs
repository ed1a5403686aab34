//! CJ operators of Gaussian channels: classification, norms and the
//! explicit Case 1 / Case 2 data.
//!
//! With `R_BA = R_B ⊗ I − I ⊗ R_Aᵀ K` the CJ form is the Fourier transform
//! of `exp(−½ zᵗμz)` over `R_BA`. The normal form of `(μ, Δ_K)` splits it
//! into four kinds of factors:
//!
//! | case | blocks | CJ factor |
//! |------|--------|-----------|
//! | 1 | `μ_j > ½` | Gaussian operator `c·exp(−R ε Rᵗ)` |
//! | 2 | `μ_j = ½` | multiple of a projector |
//! | 3 | `μ = I/2, Δ_K = 0` | function of commuting variables |
//! | 4 | `μ = Δ_K = 0` | delta function (unbounded) |

use std::fmt;

use nalgebra::DMatrix;

use crate::matkernel::RealMatrix;
use crate::symplectic::{delta_k, symplectic_eigenvalues, validate, williamson, GaussianChannelSpec, WilliamsonResult};
use crate::{Error, Real, Result, Tolerances};

/// Which of the four cases the whole channel falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CjCase {
    /// `μ − (i/2)Δ_K` nondegenerate.
    Case1,
    /// All modes pure.
    Case2,
    /// `μ > 0`, `Δ_K = 0`.
    Case3,
    /// `μ = 0`.
    Case4,
    /// A nontrivial product of several of the above.
    Mixed,
}

impl fmt::Display for CjCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CjCase::Case1 => "case1",
            CjCase::Case2 => "case2",
            CjCase::Case3 => "case3",
            CjCase::Case4 => "case4",
            CjCase::Mixed => "mixed",
        })
    }
}

/// Operator norm of the CJ form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CjNorm<T> {
    Exact(T),
    UpperBound(T),
    Unbounded,
}

impl<T: Copy> CjNorm<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            CjNorm::Exact(v) | CjNorm::UpperBound(v) => Some(*v),
            CjNorm::Unbounded => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CjNorm::Exact(_) => "exact",
            CjNorm::UpperBound(_) => "upper_bound",
            CjNorm::Unbounded => "unbounded",
        }
    }
}

/// Per-mode label of the symplectic part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeKind<T> {
    /// `μ_j > ½`: Gaussian (Case 1) factor.
    Mixed(T),
    /// `μ_j = ½`: projector (Case 2) factor.
    Pure,
}

#[derive(Clone, Debug)]
pub struct CjClassification<T: Real> {
    pub dims: [usize; 4],
    pub case: CjCase,
    pub modes: Vec<ModeKind<T>>,
    pub bounded: bool,
    pub norm: CjNorm<T>,
    pub williamson: WilliamsonResult<T>,
}

fn checked_williamson<T: Real>(
    spec: &GaussianChannelSpec<T>,
    tol: &Tolerances,
) -> Result<(RealMatrix<T>, WilliamsonResult<T>)> {
    let verdict = validate(spec, tol)?;
    if !verdict.valid {
        return Err(Error::InvalidChannel(format!("mu + (i/2) Delta_K has eigenvalue {:e}", verdict.min_eigenvalue)));
    }
    let dk = delta_k(spec);
    let w = williamson(spec.mu(), &dk, tol)?;
    Ok((dk, w))
}

fn case_of(dims: [usize; 4]) -> CjCase {
    let n: usize = dims.iter().sum();
    match dims {
        [d, ..] if d == n => CjCase::Case1,
        [_, d, ..] if d == n => CjCase::Case2,
        [_, _, d, _] if d == n => CjCase::Case3,
        [.., d] if d == n => CjCase::Case4,
        _ => CjCase::Mixed,
    }
}

fn norm_from<T: Real>(
    spec: &GaussianChannelSpec<T>,
    dk: &RealMatrix<T>,
    w: &WilliamsonResult<T>,
    tol: &Tolerances,
) -> Result<CjNorm<T>> {
    let [d1, d2, d3, d4] = w.dims;
    if d4 > 0 {
        return Ok(CjNorm::Unbounded);
    }
    if d3 == 0 {
        // 1/√(det Δ_K · det[abs(Δ_K⁻¹μ) + I/2]); each μ_j has multiplicity 2
        let eigs = symplectic_eigenvalues(spec.mu(), dk, tol)?;
        let det = dk.determinant().abs();
        let half = T::lit(0.5);
        let prod = eigs.iter().fold(T::one(), |acc, &m| acc * (m + half));
        return Ok(CjNorm::Exact(T::one() / (det.sqrt() * prod)));
    }
    let inv_sqrt_det = T::one() / spec.mu().determinant().abs().sqrt();
    if d1 + d2 == 0 {
        Ok(CjNorm::Exact(inv_sqrt_det))
    } else {
        Ok(CjNorm::UpperBound(inv_sqrt_det))
    }
}

pub fn classify<T: Real>(spec: &GaussianChannelSpec<T>, tol: &Tolerances) -> Result<CjClassification<T>> {
    let (dk, w) = checked_williamson(spec, tol)?;
    let n_mixed = w.dims[0] / 2;
    let modes = w
        .sympl_eigs
        .iter()
        .enumerate()
        .map(|(j, &m)| if j < n_mixed { ModeKind::Mixed(m) } else { ModeKind::Pure })
        .collect();
    let norm = norm_from(spec, &dk, &w, tol)?;
    Ok(CjClassification { dims: w.dims, case: case_of(w.dims), modes, bounded: w.dims[3] == 0, norm, williamson: w })
}

pub fn cj_norm<T: Real>(spec: &GaussianChannelSpec<T>, tol: &Tolerances) -> Result<CjNorm<T>> {
    let (dk, w) = checked_williamson(spec, tol)?;
    norm_from(spec, &dk, &w, tol)
}

/// `Ω_Φ = omega_prefactor · exp(−R_BA ε R_BAᵗ)` in Case 1.
#[derive(Clone, Debug)]
pub struct Case1Exponent<T: Real> {
    /// `Π 1/√(μ_j² − ¼)`: normalization of the Gaussian operator in the
    /// normal-mode variables.
    pub gibbs_prefactor: T,
    /// `gibbs_prefactor / √det Δ_K = 1/√det(μ − (i/2)Δ_K)`.
    pub omega_prefactor: T,
    /// `T · diag(θ_j/2, θ_j/2) · Tᵗ`.
    pub epsilon: RealMatrix<T>,
    /// `θ_j = ln((μ_j + ½)/(μ_j − ½))`.
    pub theta: Vec<T>,
    pub sympl_eigs: Vec<T>,
}

pub fn case1_exponent<T: Real>(spec: &GaussianChannelSpec<T>, tol: &Tolerances) -> Result<Case1Exponent<T>> {
    let (dk, w) = checked_williamson(spec, tol)?;
    let n = dk.nrows();
    if w.ranks.1 < n {
        return Err(Error::DegenerateDeltaK { rank: w.ranks.1, dim: n });
    }
    if w.dims[1] > 0 {
        return Err(Error::PureModePresent);
    }
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let theta: Vec<T> = w.sympl_eigs.iter().map(|&m| ((m + half) / (m - half)).ln()).collect();
    let mut diag = DMatrix::zeros(n, n);
    for (j, &th) in theta.iter().enumerate() {
        diag[(2 * j, 2 * j)] = th * half;
        diag[(2 * j + 1, 2 * j + 1)] = th * half;
    }
    let epsilon = &w.t * diag * w.t.transpose();
    let epsilon = (&epsilon + epsilon.transpose()).scale(half);
    let gibbs_prefactor = w.sympl_eigs.iter().fold(T::one(), |acc, &m| acc / (m * m - quarter).sqrt());
    let omega_prefactor = gibbs_prefactor / dk.determinant().abs().sqrt();
    Ok(Case1Exponent { gibbs_prefactor, omega_prefactor, epsilon, theta, sympl_eigs: w.sympl_eigs })
}

/// `Ω_Φ = prefactor · P₀` in Case 2, where `P₀` projects onto the kernel of
/// `quadratic_scale · R_BA μ⁻¹ R_BAᵗ − modes·I`.
///
/// With `TᵗμT = I/2` the normal-mode variables satisfy
/// `R̃R̃ᵗ = R_BA T Tᵗ R_BAᵗ = ½ R_BA μ⁻¹ R_BAᵗ`, so `quadratic_scale = ½`.
#[derive(Clone, Debug)]
pub struct Case2Data<T: Real> {
    pub prefactor: T,
    pub mu_inv: RealMatrix<T>,
    pub modes: usize,
    pub quadratic_scale: T,
}

impl<T: Real> Case2Data<T> {
    /// Lowest eigenvalue of the unscaled quadratic `R_BA μ⁻¹ R_BAᵗ`, i.e. the
    /// eigenvalue on the range of `P₀`.
    pub fn kernel_eigenvalue(&self) -> T {
        T::lit(self.modes as f64) / self.quadratic_scale
    }
}

pub fn case2_data<T: Real>(spec: &GaussianChannelSpec<T>, tol: &Tolerances) -> Result<Case2Data<T>> {
    let (dk, w) = checked_williamson(spec, tol)?;
    let n = dk.nrows();
    if w.dims[0] > 0 {
        return Err(Error::MixedModePresent);
    }
    if w.ranks.1 < n {
        return Err(Error::DegenerateDeltaK { rank: w.ranks.1, dim: n });
    }
    let mu_inv = spec.mu().clone().try_inverse().ok_or_else(|| Error::InvalidChannel("mu is singular".into()))?;
    Ok(Case2Data {
        prefactor: T::one() / dk.determinant().abs().sqrt(),
        mu_inv,
        modes: n / 2,
        quadratic_scale: T::lit(0.5),
    })
}

/// One-mode attenuator/amplifier `Φ*(W(z)) = W(kz) exp(−(m/2)|z|²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneModeChannel<T> {
    pub k: T,
    pub m: T,
}

impl<T: Real> OneModeChannel<T> {
    pub fn new(k: T, m: T, tol: &Tolerances) -> Result<Self> {
        if !(k.is_finite() && m.is_finite()) || k < T::zero() || m < T::zero() {
            return Err(Error::InvalidChannel(format!("need finite k >= 0 and m >= 0, got k = {k}, m = {m}")));
        }
        let ch = Self { k, m };
        if !ch.is_valid(tol) {
            return Err(Error::InvalidChannel(format!("m = {m} is below |k^2 - 1|/2 = {}", ch.gap() * T::lit(0.5))));
        }
        Ok(ch)
    }

    /// `|k² − 1|`.
    pub fn gap(&self) -> T {
        (self.k * self.k - T::one()).abs()
    }

    pub fn is_valid(&self, tol: &Tolerances) -> bool {
        self.m >= self.gap() * T::lit(0.5) - T::lit(tol.psd)
    }

    pub fn spec(&self, tol: &Tolerances) -> Result<GaussianChannelSpec<T>> {
        GaussianChannelSpec::one_mode(self.k, self.m, tol)
    }

    /// `1/(m + |k² − 1|/2)`.
    pub fn closed_form_norm(&self) -> T {
        T::one() / (self.m + self.gap() * T::lit(0.5))
    }

    /// Entanglement breaking iff `m ≥ (k² + 1)/2`.
    pub fn is_entanglement_breaking(&self, tol: &Tolerances) -> bool {
        self.m >= (self.k * self.k + T::one()) * T::lit(0.5) - T::lit(tol.psd)
    }

    /// Case 1 exponent coefficient
    /// `λ = ln((m + g/2)/(m − g/2)) / (2g)`, `g = |k² − 1|`, so that
    /// `Ω = c·exp(−λ[(q_B − k q_A)² + (p_B + k p_A)²])`.
    pub fn closed_form_lambda(&self) -> T {
        let g = self.gap();
        let h = g * T::lit(0.5);
        ((self.m + h) / (self.m - h)).ln() / (T::lit(2.0) * g)
    }

    /// `1/√(m² − (k² − 1)²/4)`.
    pub fn closed_form_prefactor(&self) -> T {
        let h = self.gap() * T::lit(0.5);
        T::one() / (self.m * self.m - h * h).sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct OneModeReport<T: Real> {
    pub channel: OneModeChannel<T>,
    pub case: CjCase,
    pub norm: CjNorm<T>,
    pub entanglement_breaking: bool,
    /// Case 1 only: coefficient `λ` of the quadratic in the exponent.
    pub lambda: Option<T>,
    /// Case 1 only: `1/√det(μ − (i/2)Δ_K)`.
    pub prefactor: Option<T>,
    /// Case 2 only: lowest eigenvalue `|k² − 1|` of the quadratic.
    pub kernel_eigenvalue: Option<T>,
}

/// Generic analysis of the one-mode channel, with the Case 1/2 data
/// extracted from the multimode routines.
pub fn one_mode_report<T: Real>(ch: &OneModeChannel<T>, tol: &Tolerances) -> Result<OneModeReport<T>> {
    let spec = ch.spec(tol)?;
    let cls = classify(&spec, tol)?;
    let (mut lambda, mut prefactor, mut kernel_eigenvalue) = (None, None, None);
    match cls.case {
        CjCase::Case1 => {
            let c1 = case1_exponent(&spec, tol)?;
            lambda = Some(c1.epsilon[(0, 0)]);
            prefactor = Some(c1.omega_prefactor);
        }
        CjCase::Case2 => {
            let c2 = case2_data(&spec, tol)?;
            // μ⁻¹ = I/m on one mode
            kernel_eigenvalue = Some(c2.kernel_eigenvalue() / c2.mu_inv[(0, 0)]);
        }
        _ => {}
    }
    Ok(OneModeReport {
        channel: *ch,
        case: cls.case,
        norm: cls.norm,
        entanglement_breaking: ch.is_entanglement_breaking(tol),
        lambda,
        prefactor,
        kernel_eigenvalue,
    })
}

/// Physical reading of a normal-form direction of the noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseCategory {
    /// Quantum noise observables in a nondegenerate (mixed) Gaussian state.
    QuantumMixed,
    /// Quantum noise observables in a pure Gaussian state.
    QuantumPure,
    /// Classical noise with positive variance.
    ClassicalPositive,
    /// Trivial classical noise with zero variance.
    ClassicalZero,
}

impl fmt::Display for NoiseCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseCategory::QuantumMixed => "quantum_mixed",
            NoiseCategory::QuantumPure => "quantum_pure",
            NoiseCategory::ClassicalPositive => "classical_positive",
            NoiseCategory::ClassicalZero => "classical_zero",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseDecomposition {
    pub dims: [usize; 4],
    /// `d₁ + d₂ = rank Δ_K`.
    pub quantum_dims: usize,
    pub classical_positive: usize,
    pub classical_zero: usize,
    /// One label per normal-form direction, in Williamson column order.
    pub labels: Vec<NoiseCategory>,
}

pub fn noise_decomposition<T: Real>(spec: &GaussianChannelSpec<T>, tol: &Tolerances) -> Result<NoiseDecomposition> {
    let (_, w) = checked_williamson(spec, tol)?;
    let [d1, d2, d3, d4] = w.dims;
    let labels = std::iter::repeat_n(NoiseCategory::QuantumMixed, d1)
        .chain(std::iter::repeat_n(NoiseCategory::QuantumPure, d2))
        .chain(std::iter::repeat_n(NoiseCategory::ClassicalPositive, d3))
        .chain(std::iter::repeat_n(NoiseCategory::ClassicalZero, d4))
        .collect();
    Ok(NoiseDecomposition { dims: w.dims, quantum_dims: d1 + d2, classical_positive: d3, classical_zero: d4, labels })
}
