//! Dense linear-algebra kernel.
//!
//! Thin, validated wrappers over `nalgebra` decompositions: Hermitian
//! eigendecomposition with ascending eigenvalues, spectral matrix
//! exponentials, and tolerance-based ranks. The block-sparse Hermitian
//! operators used by the Fock oracle live in [`sparse`].

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::{Error, Real, Result, Tolerances};

pub mod sparse;

pub use sparse::{BlockHermitian, BlockSpectrum, SparseMatrix};

/// Complex dense matrix, row-major semantics via `(row, col)` indexing.
pub type DenseMatrix<T> = DMatrix<Complex<T>>;
/// Real dense matrix.
pub type RealMatrix<T> = DMatrix<T>;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigResult<T: Real> {
    /// Eigenvalues in ascending order.
    pub values: DVector<T>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: DenseMatrix<T>,
}

impl<T: Real> EigResult<T> {
    /// `V · diag(f(λ)) · V†`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> DenseMatrix<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = Complex::from(f(self.values[j]));
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct RealEig<T: Real> {
    /// Eigenvalues in ascending order.
    pub values: DVector<T>,
    /// Orthogonal matrix of column eigenvectors.
    pub vectors: RealMatrix<T>,
}

pub fn complex<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Promotes a real matrix to a complex one.
pub fn to_complex<T: Real>(m: &RealMatrix<T>) -> DenseMatrix<T> {
    m.map(Complex::from)
}

/// Largest entry modulus.
pub fn max_abs<N: ComplexField>(m: &DMatrix<N>) -> N::RealField {
    m.iter().map(|x| x.clone().modulus()).fold(nalgebra::zero(), |a: N::RealField, b| if b > a { b } else { a })
}

pub fn check_finite<N: ComplexField>(m: &DMatrix<N>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn check_square<N: ComplexField>(m: &DMatrix<N>) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() })
    }
}

/// Validates Hermiticity and returns the symmetrized `(M + M†)/2`.
///
/// Accepts `‖M − M†‖_max ≤ tol.hermitian · (1 + ‖M‖_max)`.
pub fn hermitian_part<T: Real>(m: &DenseMatrix<T>, tol: &Tolerances) -> Result<DenseMatrix<T>> {
    check_square(m)?;
    check_finite(m)?;
    let adj = m.adjoint();
    let defect = max_abs(&(m - &adj));
    let bound = T::lit(tol.hermitian) * (T::one() + max_abs(m));
    if defect > bound {
        return Err(Error::NonHermitian { defect: defect.as_f64() });
    }
    Ok((m + adj).scale(T::lit(0.5)))
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn hermitian_eig<T: Real>(m: &DenseMatrix<T>, tol: &Tolerances) -> Result<EigResult<T>> {
    let h = hermitian_part(m, tol)?;
    let n = h.nrows();
    if n == 0 {
        return Ok(EigResult { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite"));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigResult { values, vectors })
}

/// Real symmetric eigendecomposition with ascending eigenvalues.
pub fn real_symmetric_eig<T: Real>(m: &RealMatrix<T>, tol: &Tolerances) -> Result<RealEig<T>> {
    let n = check_square(m)?;
    check_finite(m)?;
    let t = m.transpose();
    let defect = max_abs(&(m - &t));
    if defect > T::lit(tol.hermitian) * (T::one() + max_abs(m)) {
        return Err(Error::NonHermitian { defect: defect.as_f64() });
    }
    if n == 0 {
        return Ok(RealEig { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::new((m + t).scale(T::lit(0.5)));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite"));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(RealEig { values, vectors })
}

/// `exp(scale · M)` for Hermitian `M`, through the spectral decomposition.
pub fn matrix_exp_hermitian<T: Real>(m: &DenseMatrix<T>, scale: T, tol: &Tolerances) -> Result<DenseMatrix<T>> {
    let eig = hermitian_eig(m, tol)?;
    let n = eig.values.len();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let exponent = (scale * eig.values[0]).max(scale * eig.values[n - 1]);
    if exponent > T::lit(700.0) {
        return Err(Error::Overflow { exponent: exponent.as_f64() });
    }
    Ok(eig.map_spectrum(|x| (scale * x).exp()))
}

/// Number of singular values above `tol · σ_max` (zero for the zero matrix).
pub fn rank_with_tolerance<N: ComplexField>(m: &DMatrix<N>, tol: N::RealField) -> Result<usize>
where
    N::RealField: Real,
{
    check_finite(m)?;
    if m.is_empty() {
        return Ok(0);
    }
    let smax = operator_norm(m);
    rank_above(m, tol * smax)
}

/// Number of singular values strictly above an absolute threshold.
pub fn rank_above<N: ComplexField>(m: &DMatrix<N>, threshold: N::RealField) -> Result<usize>
where
    N::RealField: Real,
{
    check_finite(m)?;
    if m.is_empty() {
        return Ok(0);
    }
    let zero: N::RealField = nalgebra::zero();
    let threshold = if threshold > zero { threshold } else { zero };
    Ok(m.clone().singular_values().iter().filter(|&&s| s > threshold).count())
}

pub fn min_eigenvalue<T: Real>(m: &DenseMatrix<T>, tol: &Tolerances) -> Result<T> {
    let eig = hermitian_eig(m, tol)?;
    eig.values.iter().copied().next().ok_or(Error::NonSquare { rows: 0, cols: 0 })
}

pub fn max_eigenvalue<T: Real>(m: &DenseMatrix<T>, tol: &Tolerances) -> Result<T> {
    let eig = hermitian_eig(m, tol)?;
    eig.values.iter().copied().last().ok_or(Error::NonSquare { rows: 0, cols: 0 })
}

/// Kronecker product `a ⊗ b`; the row index of the result is `ia * b.nrows() + ib`.
pub fn kron<N: ComplexField>(a: &DMatrix<N>, b: &DMatrix<N>) -> DMatrix<N> {
    a.kronecker(b)
}

pub fn identity<T: Real>(n: usize) -> DenseMatrix<T> {
    DMatrix::identity(n, n)
}

/// Max-norm distance between two matrices of the same shape.
pub fn max_diff<N: ComplexField>(a: &DMatrix<N>, b: &DMatrix<N>) -> N::RealField {
    max_abs(&(a - b))
}

/// Largest singular value.
pub fn operator_norm<N: ComplexField>(m: &DMatrix<N>) -> N::RealField
where
    N::RealField: Real,
{
    m.clone().singular_values().iter().copied().fold(nalgebra::zero(), |a: N::RealField, b| if b > a { b } else { a })
}

/// Hermitian square root of a positive semidefinite matrix.
pub fn psd_sqrt<T: Real>(m: &DenseMatrix<T>, tol: &Tolerances) -> Result<DenseMatrix<T>> {
    let eig = hermitian_eig(m, tol)?;
    if let Some(&lo) = eig.values.iter().next() {
        if lo < -T::lit(tol.psd) {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: lo.as_f64() });
        }
    }
    Ok(eig.map_spectrum(|x| x.max(T::zero()).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(rows: usize, data: &[f64]) -> DenseMatrix<f64> {
        to_complex(&DMatrix::from_row_slice(rows, data.len() / rows, data))
    }

    fn std_delta_c() -> DenseMatrix<f64> {
        real(2, &[0.0, -1.0, 1.0, 0.0])
    }

    /// Truncated power series Σ Aⁿ/n!, independent of any decomposition.
    fn exp_series(a: &DenseMatrix<f64>) -> DenseMatrix<f64> {
        let n = a.nrows();
        let mut term = identity::<f64>(n);
        let mut sum = term.clone();
        for k in 1..80 {
            term = &term * a / Complex::from(k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn eig_identity() {
        let e = hermitian_eig(&identity::<f64>(2), &Tolerances::default()).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 1.0]);
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!(max_diff(&gram, &identity(2)) < 1e-14);
    }

    #[test]
    fn eig_diagonal_sorted() {
        let e = hermitian_eig(&real(2, &[2.0, 0.0, 0.0, -1.0]), &Tolerances::default()).unwrap();
        assert_eq!(e.values.as_slice(), &[-1.0, 2.0]);
    }

    #[test]
    fn eig_pauli_x() {
        let m = real(2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eig(&m, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        assert!(max_diff(&e.map_spectrum(|x| x), &m) < 1e-14);
    }

    #[test]
    fn eig_errors() {
        let tol = Tolerances::default();
        let rect = DenseMatrix::<f64>::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect, &tol), Err(Error::NonSquare { .. })));
        let skew = std_delta_c();
        assert!(matches!(hermitian_eig(&skew, &tol), Err(Error::NonHermitian { .. })));
        let mut nan = identity::<f64>(2);
        nan[(0, 0)] = Complex::new(f64::NAN, 0.0);
        assert_eq!(hermitian_eig(&nan, &tol).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let m = real(2, &[1.0, 0.5 + 1e-13, 0.5, 1.0]);
        let e = hermitian_eig(&m, &Tolerances::default()).unwrap();
        assert_abs_diff_eq!(e.values[1], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn exp_of_zero_scale_is_identity() {
        let m = real(2, &[3.0, 1.0, 1.0, -2.0]);
        let e = matrix_exp_hermitian(&m, 0.0, &Tolerances::default()).unwrap();
        assert!(max_diff(&e, &identity(2)) < 1e-14);
    }

    #[test]
    fn exp_diagonal() {
        let m = real(2, &[2f64.ln(), 0.0, 0.0, 0.0]);
        let e = matrix_exp_hermitian(&m, 1.0, &Tolerances::default()).unwrap();
        assert!(max_diff(&e, &real(2, &[2.0, 0.0, 0.0, 1.0])) < 1e-14);
    }

    #[test]
    fn exp_pauli_x_matches_series() {
        let x = real(2, &[0.0, 1.0, 1.0, 0.0]);
        let scale = 3f64.ln();
        let oracle = exp_series(&(&x * Complex::from(scale)));
        // frozen from the series: cosh(ln 3) = 5/3, sinh(ln 3) = 4/3
        let frozen = real(2, &[5.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0, 5.0 / 3.0]);
        assert!(max_diff(&oracle, &frozen) < 1e-13);
        let e = matrix_exp_hermitian(&x, scale, &Tolerances::default()).unwrap();
        assert!(max_diff(&e, &frozen) < 1e-13);
    }

    #[test]
    fn exp_overflow() {
        let m = real(1, &[800.0]);
        assert!(matches!(matrix_exp_hermitian(&m, 1.0, &Tolerances::default()), Err(Error::Overflow { .. })));
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_with_tolerance(&DenseMatrix::<f64>::zeros(3, 3), 1e-9).unwrap(), 0);
        assert_eq!(rank_with_tolerance(&real(2, &[1.0, 0.0, 0.0, 1e-14]), 1e-9).unwrap(), 1);
        assert_eq!(rank_with_tolerance(&std_delta_c(), 1e-9).unwrap(), 2);
        let r = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(rank_with_tolerance(&r, 1e-9).unwrap(), 2);
    }

    #[test]
    fn min_eigenvalues() {
        let tol = Tolerances::default();
        assert_abs_diff_eq!(min_eigenvalue(&identity::<f64>(2), &tol).unwrap(), 1.0);
        assert_abs_diff_eq!(min_eigenvalue(&real(2, &[3.0, 0.0, 0.0, -2.0]), &tol).unwrap(), -2.0);
        // ½I + (i/2)Δ = [[½, -i/2], [i/2, ½]] has eigenvalues {0, 1}
        let m = identity::<f64>(2).scale(0.5) + std_delta_c() * Complex::new(0.0, 0.5);
        assert_abs_diff_eq!(min_eigenvalue(&m, &tol).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn single_precision_eig() {
        let m: DenseMatrix<f32> = to_complex(&DMatrix::from_row_slice(2, 2, &[2.0f32, 1.0, 1.0, 2.0]));
        let e = hermitian_eig(&m, &Tolerances::single_precision()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-5);
        assert!((e.values[1] - 3.0).abs() < 1e-5);
    }
}
