use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },
    #[error("matrix exponential overflows (scale * lambda_max = {exponent})")]
    Overflow { exponent: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("map is not trace preserving (partial-trace deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },
    #[error("Kraus set is incomplete (|sum V^dag V - I| = {deviation:e})")]
    IncompleteKrausSet { deviation: f64 },
    #[error("not a density matrix: {0}")]
    InvalidDensity(String),
    #[error("reference state is not full rank")]
    SigmaNotFullRank,
    #[error("reference state is not diagonal in the CJ basis")]
    SigmaNotDiagonal,
    #[error("reference eigenvalue {value:e} is below the floor {floor:e}")]
    EigenvalueUnderflow { value: f64, floor: f64 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid preparation ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("number of modes must be at least 1")]
    ZeroModes,
    #[error("noise commutator form Delta_K is degenerate (rank {rank} of {dim})")]
    DegenerateDeltaK { rank: usize, dim: usize },
    #[error("pair violates mu >= (i/2) Delta_K (min eigenvalue {min_eigenvalue:e})")]
    InvalidPair { min_eigenvalue: f64 },
    #[error("rank of {what} is unstable under tolerance change ({low} vs {high})")]
    RankInstability { what: &'static str, low: usize, high: usize },
    #[error("numerical ranks r_mu = {r_mu}, r_Delta_K = {r_dk}, r_c = {r_c} violate the rank identities")]
    InconsistentRanks { r_mu: usize, r_dk: usize, r_c: usize },
    #[error("invalid Gaussian channel: {0}")]
    InvalidChannel(String),
    #[error("a pure mode (mu_j = 1/2) is present")]
    PureModePresent,
    #[error("a mixed mode (mu_j > 1/2) is present")]
    MixedModePresent,

    #[error("parameters are not in the nondegenerate-noise regime: {0}")]
    NotCase1(String),
    #[error("truncation {n} is below the minimum {min}")]
    TruncationTooSmall { n: usize, min: usize },
    #[error("mode is pure (mu_j = {mu} is within the window of 1/2)")]
    PureMode { mu: f64 },
}
