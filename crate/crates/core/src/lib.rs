//! Choi–Jamiolkowski calculus for quantum channels.
//!
//! The crate covers two regimes:
//!
//! * finite-dimensional channels: Choi matrices, Kraus sets, Jamiolkowski
//!   states, measure-and-prepare (entanglement-breaking) channels;
//! * bosonic Gaussian channels `Φ*(W_B(z)) = W_A(Kz) exp(-½ zᵗμz)`: the
//!   generalized Williamson normal form of `(μ, Δ_K)`, the four-way
//!   classification of the CJ form, exact CJ operator norms, and a
//!   truncated Fock-space oracle that realizes the one-mode CJ operator as
//!   an explicit matrix.
//!
//! All numerics are generic over the real scalar type (`f32` or `f64`,
//! see [`Real`]); the `*64` aliases below fix the double-precision
//! instantiation that the command-line tool uses.
//!
//! Tensor products on `H_B ⊗ H_A` are always B-major: the basis vector
//! `|k⟩ ⊗ |i⟩` has index `k * d_A + i`.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;

pub mod choi;
pub mod ebreak;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod matkernel;
pub mod sample;
pub mod symplectic;

pub use error::{Error, Result};

/// Real scalar the numerics are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are always configured as
/// `f64` (see [`Tolerances`]) and converted with [`Real::lit`] at the point
/// of use.
pub trait Real:
    RealField + Copy + num_traits::ToPrimitive + num_traits::FromPrimitive + LowerExp + Display + Debug
{
    /// Converts an `f64` literal or configuration value into `Self`.
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("finite real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numerical thresholds shared by every module.
///
/// None of these are hard-coded at call sites; every operation that makes a
/// tolerance-dependent decision takes a `&Tolerances`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity defect accepted (and symmetrized away).
    pub hermitian: f64,
    /// Absolute slack on minimum eigenvalues in positivity checks.
    pub psd: f64,
    /// Max-norm slack on partial-trace and trace identities.
    pub trace: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank: f64,
    /// Second rank threshold; a rank that differs between `rank` and this
    /// value is reported as unstable.
    pub rank_stability: f64,
    /// Choi eigenvalues below `kraus_drop * λ_max` yield no Kraus operator.
    pub kraus_drop: f64,
    /// Symplectic eigenvalues within this window of ½ count as pure modes.
    pub pure_window: f64,
    /// Smallest admissible eigenvalue of the reference state in
    /// channel recovery.
    pub lambda_floor: f64,
    /// Max-norm slack on `U†U = I`.
    pub unitary: f64,
    /// Relative asymmetry accepted in the noise matrix `μ`.
    pub symmetry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            psd: 1e-10,
            trace: 1e-10,
            rank: 1e-9,
            rank_stability: 1e-8,
            kraus_drop: 1e-12,
            pure_window: 1e-7,
            lambda_floor: 1e-8,
            unitary: 1e-10,
            symmetry: 1e-12,
        }
    }
}

impl Tolerances {
    /// Thresholds loosened to what `f32` arithmetic can honour.
    pub fn single_precision() -> Self {
        Self {
            hermitian: 1e-5,
            psd: 1e-5,
            trace: 1e-5,
            rank: 1e-4,
            rank_stability: 1e-3,
            kraus_drop: 1e-6,
            pure_window: 1e-3,
            lambda_floor: 1e-4,
            unitary: 1e-5,
            symmetry: 1e-6,
        }
    }
}

pub type DenseMatrix64 = matkernel::DenseMatrix<f64>;
pub type RealMatrix64 = matkernel::RealMatrix<f64>;
pub type ChannelBlocks64 = choi::ChannelBlocks<f64>;
pub type ChoiMatrix64 = choi::ChoiMatrix<f64>;
pub type KrausSet64 = choi::KrausSet<f64>;
pub type DensityMatrix64 = choi::DensityMatrix<f64>;
pub type EbChannel64 = ebreak::EbChannel<f64>;
pub type GaussianChannelSpec64 = symplectic::GaussianChannelSpec<f64>;
pub type WilliamsonResult64 = symplectic::WilliamsonResult<f64>;
pub type CjClassification64 = gaussian::CjClassification<f64>;
pub type Case1Exponent64 = gaussian::Case1Exponent<f64>;
pub type OneModeChannel64 = gaussian::OneModeChannel<f64>;
pub type FockOps64 = fock::FockOps<f64>;
pub type OmegaNumeric64 = fock::OmegaNumeric<f64>;
