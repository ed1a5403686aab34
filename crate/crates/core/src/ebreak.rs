//! Measure-and-prepare (entanglement-breaking) channels
//! `Φ(ρ) = Σ_α Tr(ρ M_α) ρ_α` and their separable Choi matrices.

use nalgebra::{Complex, DMatrix};

use crate::choi::{partial_transpose_a, ChoiMatrix, DensityMatrix};
use crate::matkernel::{hermitian_eig, hermitian_part, identity, max_diff, min_eigenvalue, DenseMatrix};
use crate::{Error, Real, Result, Tolerances};

/// Finite resolution of the identity on `H_A`.
#[derive(Clone, Debug)]
pub struct FinitePovm<T: Real> {
    elements: Vec<DenseMatrix<T>>,
}

impl<T: Real> FinitePovm<T> {
    pub fn new(elements: Vec<DenseMatrix<T>>, tol: &Tolerances) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let d = first.nrows();
        let mut sum = DMatrix::zeros(d, d);
        let mut checked = Vec::with_capacity(elements.len());
        for (a, m) in elements.into_iter().enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::InvalidPovm(format!("element {a} is not {d}x{d}")));
            }
            let m = hermitian_part(&m, tol).map_err(|e| Error::InvalidPovm(format!("element {a}: {e}")))?;
            let lo = min_eigenvalue(&m, tol)?;
            if lo < -T::lit(tol.psd) {
                return Err(Error::InvalidPovm(format!("element {a} has eigenvalue {:e}", lo.as_f64())));
            }
            sum += &m;
            checked.push(m);
        }
        let deviation = max_diff(&sum, &identity(d));
        if deviation > T::lit(tol.trace) {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {:e}", deviation.as_f64())));
        }
        Ok(Self { elements: checked })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize, tol: &Tolerances) -> Result<Self> {
        let elements = (0..d)
            .map(|a| {
                let mut m = DMatrix::zeros(d, d);
                m[(a, a)] = Complex::from(T::one());
                m
            })
            .collect();
        Self::new(elements, tol)
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[DenseMatrix<T>] {
        &self.elements
    }
}

/// States prepared on `H_B`, one per outcome.
#[derive(Clone, Debug)]
pub struct PreparationEnsemble<T: Real> {
    states: Vec<DensityMatrix<T>>,
}

impl<T: Real> PreparationEnsemble<T> {
    pub fn new(states: Vec<DensityMatrix<T>>) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidEnsemble("no states".into()))?;
        let d = first.dim();
        if let Some(a) = states.iter().position(|s| s.dim() != d) {
            return Err(Error::InvalidEnsemble(format!("state {a} is not on dimension {d}")));
        }
        Ok(Self { states })
    }

    /// Validates raw matrices as density matrices.
    pub fn from_matrices(matrices: Vec<DenseMatrix<T>>, tol: &Tolerances) -> Result<Self> {
        let states = matrices
            .into_iter()
            .enumerate()
            .map(|(a, m)| DensityMatrix::new(m, tol).map_err(|e| Error::InvalidEnsemble(format!("state {a}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }
}

#[derive(Clone, Debug)]
pub struct EbChannel<T: Real> {
    povm: FinitePovm<T>,
    ensemble: PreparationEnsemble<T>,
}

impl<T: Real> EbChannel<T> {
    pub fn new(povm: FinitePovm<T>, ensemble: PreparationEnsemble<T>) -> Result<Self> {
        if povm.len() != ensemble.len() {
            return Err(Error::InvalidEnsemble(format!("{} states for {} POVM outcomes", ensemble.len(), povm.len())));
        }
        Ok(Self { povm, ensemble })
    }

    pub fn povm(&self) -> &FinitePovm<T> {
        &self.povm
    }

    pub fn ensemble(&self) -> &PreparationEnsemble<T> {
        &self.ensemble
    }

    pub fn d_a(&self) -> usize {
        self.povm.dim()
    }

    pub fn d_b(&self) -> usize {
        self.ensemble.dim()
    }
}

/// `C = Σ_α ρ_α ⊗ conj(M_α)`.
pub fn separable_choi<T: Real>(eb: &EbChannel<T>, tol: &Tolerances) -> Result<ChoiMatrix<T>> {
    let (d_a, d_b) = (eb.d_a(), eb.d_b());
    let mut c = DMatrix::zeros(d_a * d_b, d_a * d_b);
    for (m, rho) in eb.povm.elements.iter().zip(&eb.ensemble.states) {
        c += rho.matrix().kronecker(&m.conjugate());
    }
    ChoiMatrix::from_matrix(d_a, d_b, c, tol)
}

/// `Φ(ρ) = Σ_α Tr(ρ M_α) ρ_α`.
pub fn eb_apply<T: Real>(eb: &EbChannel<T>, rho: &DensityMatrix<T>, tol: &Tolerances) -> Result<DensityMatrix<T>> {
    if rho.dim() != eb.d_a() {
        return Err(Error::DimensionMismatch(format!("input state of dimension {} for d_A = {}", rho.dim(), eb.d_a())));
    }
    let d_b = eb.d_b();
    let mut out = DMatrix::zeros(d_b, d_b);
    for (m, prep) in eb.povm.elements.iter().zip(&eb.ensemble.states) {
        let p = (rho.matrix() * m).trace();
        out += prep.matrix() * p;
    }
    DensityMatrix::new(out, tol)
}

/// Minimum eigenvalue of the partial transpose over A of a matrix on
/// `H_B ⊗ H_A`. Negative values certify entanglement; nonnegative values
/// certify nothing.
pub fn ppt_min_eigenvalue<T: Real>(m: &DenseMatrix<T>, d_b: usize, d_a: usize, tol: &Tolerances) -> Result<T> {
    if m.nrows() != d_b * d_a || m.ncols() != d_b * d_a {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on {d_b}x{d_a} tensor product",
            m.nrows(),
            m.ncols()
        )));
    }
    let pt = partial_transpose_a(m, d_b, d_a);
    Ok(hermitian_eig(&pt, tol)?.values[0])
}
