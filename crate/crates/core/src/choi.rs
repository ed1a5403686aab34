//! Finite-dimensional Choi–Jamiolkowski correspondence.
//!
//! A channel `Φ: 𝔗(H_A) → 𝔗(H_B)` is encoded by the block matrix
//! `B_ij = Φ(|i⟩⟨j|)` and by its Choi matrix
//!
//! ```text
//! C[(k,i),(l,j)] = ⟨k| B_ij |l⟩,   row index (k,i) = k·d_A + i
//! ```
//!
//! on `H_B ⊗ H_A` (B-major). A map is a channel iff `C ⪰ 0` and
//! `Tr_B C = I_A`. All transpositions and conjugations are taken in the
//! fixed basis `{|i⟩}` of `H_A`.

use nalgebra::{Complex, ComplexField, DMatrix};

use crate::matkernel::{hermitian_eig, hermitian_part, identity, max_abs, max_diff, DenseMatrix};
use crate::{Error, Real, Result, Tolerances};

/// `Tr_B M` for `M` on `H_B ⊗ H_A`.
pub fn partial_trace_b<T: Real>(m: &DenseMatrix<T>, d_b: usize, d_a: usize) -> DenseMatrix<T> {
    DMatrix::from_fn(d_a, d_a, |i, j| (0..d_b).map(|k| m[(k * d_a + i, k * d_a + j)]).sum())
}

/// `Tr_A M` for `M` on `H_B ⊗ H_A`.
pub fn partial_trace_a<T: Real>(m: &DenseMatrix<T>, d_b: usize, d_a: usize) -> DenseMatrix<T> {
    DMatrix::from_fn(d_b, d_b, |k, l| (0..d_a).map(|i| m[(k * d_a + i, l * d_a + i)]).sum())
}

/// Transpose of the A factor: `M^{T_A}[(k,i),(l,j)] = M[(k,j),(l,i)]`.
pub fn partial_transpose_a<T: Real>(m: &DenseMatrix<T>, d_b: usize, d_a: usize) -> DenseMatrix<T> {
    let n = d_b * d_a;
    DMatrix::from_fn(n, n, |r, c| {
        let (k, i) = (r / d_a, r % d_a);
        let (l, j) = (c / d_a, c % d_a);
        m[(k * d_a + j, l * d_a + i)]
    })
}

fn check_dims<T: Real>(m: &DenseMatrix<T>, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "{what}: expected {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// The block matrix `[Φ(|i⟩⟨j|)]` of a channel.
#[derive(Clone, Debug)]
pub struct ChannelBlocks<T: Real> {
    d_a: usize,
    d_b: usize,
    /// `blocks[i * d_a + j] = Φ(|i⟩⟨j|)`.
    blocks: Vec<DenseMatrix<T>>,
}

impl<T: Real> ChannelBlocks<T> {
    /// Checks shapes, `B_ji = B_ij†`, and `Σ_i Tr B_ii = d_A`.
    pub fn new(d_a: usize, d_b: usize, blocks: Vec<DenseMatrix<T>>, tol: &Tolerances) -> Result<Self> {
        if d_a == 0 || d_b == 0 || blocks.len() != d_a * d_a {
            return Err(Error::DimensionMismatch(format!("{} blocks for d_A = {d_a}", blocks.len())));
        }
        for b in &blocks {
            check_dims(b, d_b, d_b, "channel block")?;
            crate::matkernel::check_finite(b)?;
        }
        let scale = T::one() + blocks.iter().map(max_abs).fold(T::zero(), |a, b| a.max(b));
        for i in 0..d_a {
            for j in 0..d_a {
                let defect = max_diff(&blocks[j * d_a + i], &blocks[i * d_a + j].adjoint());
                if defect > T::lit(tol.hermitian) * scale {
                    return Err(Error::NonHermitian { defect: defect.as_f64() });
                }
            }
        }
        let total = (0..d_a).fold(T::zero(), |acc, i| acc + blocks[i * d_a + i].trace().re);
        let deviation = (total - T::lit(d_a as f64)).abs();
        if deviation > T::lit(tol.trace * d_a as f64) {
            return Err(Error::NotTracePreserving { deviation: deviation.as_f64() });
        }
        Ok(Self { d_a, d_b, blocks })
    }

    /// Evaluates a linear map on the matrix units `|i⟩⟨j|`.
    pub fn from_map(
        d_a: usize,
        d_b: usize,
        map: impl Fn(&DenseMatrix<T>) -> DenseMatrix<T>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let mut blocks = Vec::with_capacity(d_a * d_a);
        for i in 0..d_a {
            for j in 0..d_a {
                let mut unit = DMatrix::zeros(d_a, d_a);
                unit[(i, j)] = Complex::from(T::one());
                blocks.push(map(&unit));
            }
        }
        Self::new(d_a, d_b, blocks, tol)
    }

    pub fn identity(d: usize, tol: &Tolerances) -> Result<Self> {
        Self::from_map(d, d, |x| x.clone(), tol)
    }

    /// `ρ ↦ Tr(ρ) I/d_B`.
    pub fn completely_depolarizing(d_a: usize, d_b: usize, tol: &Tolerances) -> Result<Self> {
        let w = T::one() / T::lit(d_b as f64);
        Self::from_map(d_a, d_b, |x| identity::<T>(d_b) * (x.trace() * Complex::from(w)), tol)
    }

    /// Transposition `ρ ↦ ρᵀ`: positive and trace preserving, not completely positive.
    pub fn transpose(d: usize, tol: &Tolerances) -> Result<Self> {
        Self::from_map(d, d, |x| x.transpose(), tol)
    }

    /// Unitary conjugation `ρ ↦ UρU†`.
    pub fn unitary(u: &DenseMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let (d_b, d_a) = (u.nrows(), u.ncols());
        Self::from_map(d_a, d_b, |x| u * x * u.adjoint(), tol)
    }

    pub fn from_kraus(k: &KrausSet<T>, tol: &Tolerances) -> Result<Self> {
        Self::from_map(k.d_a, k.d_b, |x| k.apply_unchecked(x), tol)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// `Φ(|i⟩⟨j|)`.
    pub fn block(&self, i: usize, j: usize) -> &DenseMatrix<T> {
        &self.blocks[i * self.d_a + j]
    }
}

/// Validated Choi matrix on `H_B ⊗ H_A`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix<T: Real> {
    d_a: usize,
    d_b: usize,
    matrix: DenseMatrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    /// `C[(k,i),(l,j)] = ⟨k|B_ij|l⟩`, then validated.
    pub fn from_blocks(blocks: &ChannelBlocks<T>, tol: &Tolerances) -> Result<Self> {
        let (d_a, d_b) = (blocks.d_a, blocks.d_b);
        let n = d_a * d_b;
        let matrix = DMatrix::from_fn(n, n, |r, c| {
            let (k, i) = (r / d_a, r % d_a);
            let (l, j) = (c / d_a, c % d_a);
            blocks.block(i, j)[(k, l)]
        });
        Self::from_matrix(d_a, d_b, matrix, tol)
    }

    /// Validates `C ⪰ −tol.psd` and `‖Tr_B C − I_A‖_max ≤ tol.trace`.
    pub fn from_matrix(d_a: usize, d_b: usize, matrix: DenseMatrix<T>, tol: &Tolerances) -> Result<Self> {
        check_dims(&matrix, d_a * d_b, d_a * d_b, "Choi matrix")?;
        let matrix = hermitian_part(&matrix, tol)?;
        let lo = hermitian_eig(&matrix, tol)?.values[0];
        if lo < -T::lit(tol.psd) {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: lo.as_f64() });
        }
        let deviation = max_diff(&partial_trace_b(&matrix, d_b, d_a), &identity(d_a));
        if deviation > T::lit(tol.trace) {
            return Err(Error::NotTracePreserving { deviation: deviation.as_f64() });
        }
        Ok(Self { d_a, d_b, matrix })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn to_blocks(&self) -> ChannelBlocks<T> {
        let (d_a, d_b) = (self.d_a, self.d_b);
        let blocks = (0..d_a * d_a)
            .map(|ij| {
                let (i, j) = (ij / d_a, ij % d_a);
                DMatrix::from_fn(d_b, d_b, |k, l| self.matrix[(k * d_a + i, l * d_a + j)])
            })
            .collect();
        ChannelBlocks { d_a, d_b, blocks }
    }

    pub fn eigenvalues(&self, tol: &Tolerances) -> Result<Vec<T>> {
        Ok(hermitian_eig(&self.matrix, tol)?.values.iter().copied().collect())
    }

    /// Operator norm `‖C‖ = λ_max(C)`.
    pub fn norm(&self, tol: &Tolerances) -> Result<T> {
        Ok(*hermitian_eig(&self.matrix, tol)?.values.iter().last().expect("nonempty"))
    }
}

/// Kraus operators `V_l: H_A → H_B`.
#[derive(Clone, Debug)]
pub struct KrausSet<T: Real> {
    d_a: usize,
    d_b: usize,
    ops: Vec<DenseMatrix<T>>,
}

impl<T: Real> KrausSet<T> {
    /// Checks that all operators share one `d_B × d_A` shape.
    /// Completeness is checked where the set is applied.
    pub fn new(ops: Vec<DenseMatrix<T>>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::DimensionMismatch("empty Kraus set".into()))?;
        let (d_b, d_a) = (first.nrows(), first.ncols());
        for v in &ops {
            check_dims(v, d_b, d_a, "Kraus operator")?;
            crate::matkernel::check_finite(v)?;
        }
        Ok(Self { d_a, d_b, ops })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn ops(&self) -> &[DenseMatrix<T>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `‖Σ V_l†V_l − I_A‖_max`.
    pub fn completeness_residual(&self) -> T {
        let mut sum = DMatrix::zeros(self.d_a, self.d_a);
        for v in &self.ops {
            sum += v.adjoint() * v;
        }
        max_diff(&sum, &identity(self.d_a))
    }

    fn apply_unchecked(&self, rho: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut out = DMatrix::zeros(self.d_b, self.d_b);
        for v in &self.ops {
            out += v * rho * v.adjoint();
        }
        out
    }
}

/// Unit-trace positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real> {
    matrix: DenseMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Symmetrizes, then requires `λ_min ≥ −tol.psd` and `|Tr − 1| ≤ tol.trace`.
    pub fn new(matrix: DenseMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let matrix = hermitian_part(&matrix, tol).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        let lo = hermitian_eig(&matrix, tol)?.values[0];
        if lo < -T::lit(tol.psd) {
            return Err(Error::InvalidDensity(format!("min eigenvalue {:e}", lo.as_f64())));
        }
        let tr = matrix.trace().re;
        if (tr - T::one()).abs() > T::lit(tol.trace) {
            return Err(Error::InvalidDensity(format!("trace {}", tr.as_f64())));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `ψ`.
    pub fn pure(psi: &[Complex<T>], tol: &Tolerances) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == T::zero() {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let v = v.unscale(norm);
        Self::new(&v * v.adjoint(), tol)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(p: &[T], tol: &Tolerances) -> Result<Self> {
        let n = p.len();
        Self::new(
            DMatrix::from_fn(n, n, |i, j| if i == j { Complex::from(p[i]) } else { Complex::from(T::zero()) }),
            tol,
        )
    }

    pub fn maximally_mixed(d: usize, tol: &Tolerances) -> Result<Self> {
        Self::diagonal(&vec![T::one() / T::lit(d as f64); d], tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.matrix
    }
}

/// `Φ(ρ) = Tr_A[C (I_B ⊗ ρᵀ)]`.
pub fn apply_channel<T: Real>(c: &ChoiMatrix<T>, rho: &DensityMatrix<T>, tol: &Tolerances) -> Result<DensityMatrix<T>> {
    let (d_a, d_b) = (c.d_a, c.d_b);
    if rho.dim() != d_a {
        return Err(Error::DimensionMismatch(format!(
            "input state of dimension {} for channel with d_A = {d_a}",
            rho.dim()
        )));
    }
    let r = rho.matrix();
    let m = &c.matrix;
    let out = DMatrix::from_fn(d_b, d_b, |k, l| {
        let mut acc = Complex::from(T::zero());
        for i in 0..d_a {
            for j in 0..d_a {
                acc += m[(k * d_a + i, l * d_a + j)] * r[(i, j)];
            }
        }
        acc
    });
    DensityMatrix::new(out, tol)
}

/// Kraus operators from the eigendecomposition `C = Σ λ_l |v_l⟩⟨v_l|`,
/// `V_l[k, i] = √λ_l · v_l[(k, i)]`; eigenvalues below
/// `tol.kraus_drop · λ_max` are discarded.
pub fn kraus_from_choi<T: Real>(c: &ChoiMatrix<T>, tol: &Tolerances) -> Result<KrausSet<T>> {
    let (d_a, d_b) = (c.d_a, c.d_b);
    let eig = hermitian_eig(&c.matrix, tol)?;
    let n = eig.values.len();
    let lo = eig.values[0];
    if lo < -T::lit(tol.psd) {
        return Err(Error::NotCompletelyPositive { min_eigenvalue: lo.as_f64() });
    }
    let top = eig.values[n - 1];
    let cutoff = T::lit(tol.kraus_drop) * top;
    let ops = (0..n)
        .rev()
        .filter(|&l| eig.values[l] > cutoff)
        .map(|l| {
            let w = Complex::from(eig.values[l].sqrt());
            DMatrix::from_fn(d_b, d_a, |k, i| eig.vectors[(k * d_a + i, l)] * w)
        })
        .collect();
    KrausSet::new(ops)
}

/// `Φ(ρ) = Σ V_l ρ V_l†`.
pub fn apply_kraus<T: Real>(k: &KrausSet<T>, rho: &DensityMatrix<T>, tol: &Tolerances) -> Result<DensityMatrix<T>> {
    if rho.dim() != k.d_a {
        return Err(Error::DimensionMismatch(format!(
            "input state of dimension {} for Kraus set with d_A = {}",
            rho.dim(),
            k.d_a
        )));
    }
    let residual = k.completeness_residual();
    if residual > T::lit(tol.trace) {
        return Err(Error::IncompleteKrausSet { deviation: residual.as_f64() });
    }
    DensityMatrix::new(k.apply_unchecked(rho.matrix()), tol)
}

fn diagonal_spectrum<T: Real>(sigma: &DensityMatrix<T>, tol: &Tolerances) -> Result<Vec<T>> {
    let m = sigma.matrix();
    let d = m.nrows();
    for i in 0..d {
        for j in 0..d {
            if i != j && m[(i, j)].modulus() > T::lit(tol.trace) {
                return Err(Error::SigmaNotDiagonal);
            }
        }
    }
    let lambda: Vec<T> = (0..d).map(|i| m[(i, i)].re).collect();
    if lambda.iter().any(|&l| l <= T::zero()) {
        return Err(Error::SigmaNotFullRank);
    }
    Ok(lambda)
}

/// `ρ_Φ(σ) = (I_B ⊗ σ^{1/2}) C (I_B ⊗ σ^{1/2})` for `σ` diagonal in the CJ basis.
pub fn jam_state<T: Real>(c: &ChoiMatrix<T>, sigma: &DensityMatrix<T>, tol: &Tolerances) -> Result<DensityMatrix<T>> {
    let d_a = c.d_a;
    if sigma.dim() != d_a {
        return Err(Error::DimensionMismatch(format!("reference state of dimension {} for d_A = {d_a}", sigma.dim())));
    }
    let root: Vec<T> = diagonal_spectrum(sigma, tol)?.into_iter().map(|l| l.sqrt()).collect();
    let n = c.matrix.nrows();
    let out = DMatrix::from_fn(n, n, |r, s| c.matrix[(r, s)] * Complex::from(root[r % d_a] * root[s % d_a]));
    DensityMatrix::new(out, tol)
}

/// `Φ(|i⟩⟨j|) = (λ_i λ_j)^{-1/2} Tr_A[(I_B ⊗ |j⟩⟨i|) ρ_Φ(σ)]`.
pub fn recover_blocks<T: Real>(rho: &DensityMatrix<T>, lambda: &[T], tol: &Tolerances) -> Result<ChannelBlocks<T>> {
    let d_a = lambda.len();
    let n = rho.dim();
    if d_a == 0 || !n.is_multiple_of(d_a) {
        return Err(Error::DimensionMismatch(format!("state of dimension {n} is not a multiple of d_A = {d_a}")));
    }
    let floor = T::lit(tol.lambda_floor);
    if let Some(&bad) = lambda.iter().find(|&&l| l <= floor) {
        return Err(Error::EigenvalueUnderflow { value: bad.as_f64(), floor: tol.lambda_floor });
    }
    let d_b = n / d_a;
    let m = rho.matrix();
    let mut blocks = Vec::with_capacity(d_a * d_a);
    for i in 0..d_a {
        for j in 0..d_a {
            let w = Complex::from(T::one() / (lambda[i] * lambda[j]).sqrt());
            blocks.push(DMatrix::from_fn(d_b, d_b, |k, l| m[(k * d_a + i, l * d_a + j)] * w));
        }
    }
    // the trace identity only holds to 1/λ_min-amplified rounding here
    let loose = Tolerances { trace: tol.trace / lambda.iter().fold(T::one(), |a, &b| a.min(b)).as_f64(), ..*tol };
    ChannelBlocks::new(d_a, d_b, blocks, &loose)
}

/// Choi matrix in the rotated basis `|i⟩' = U|i⟩`:
/// `C' = (I ⊗ UUᵀ) C (I ⊗ UUᵀ)†`.
pub fn basis_change<T: Real>(c: &ChoiMatrix<T>, u: &DenseMatrix<T>, tol: &Tolerances) -> Result<ChoiMatrix<T>> {
    let d_a = c.d_a;
    check_dims(u, d_a, d_a, "basis change")?;
    let deviation = max_diff(&(u.adjoint() * u), &identity(d_a));
    if deviation > T::lit(tol.unitary) {
        return Err(Error::NotUnitary { deviation: deviation.as_f64() });
    }
    let w = identity::<T>(c.d_b).kronecker(&(u * u.transpose()));
    let rotated = &w * &c.matrix * w.adjoint();
    ChoiMatrix::from_matrix(d_a, c.d_b, rotated, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn real(rows: usize, data: &[f64]) -> DenseMatrix<f64> {
        crate::matkernel::to_complex(&DMatrix::from_row_slice(rows, data.len() / rows, data))
    }

    fn pauli_x() -> DenseMatrix<f64> {
        real(2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn choi_of(blocks: ChannelBlocks<f64>) -> ChoiMatrix<f64> {
        ChoiMatrix::from_blocks(&blocks, &tol()).unwrap()
    }

    #[test]
    fn identity_choi_is_omega_projector() {
        let ch = choi_of(ChannelBlocks::identity(2, &tol()).unwrap());
        let m = ch.matrix();
        for r in 0..4 {
            for s in 0..4 {
                let expect = if [0, 3].contains(&r) && [0, 3].contains(&s) { 1.0 } else { 0.0 };
                assert_eq!(m[(r, s)], c(expect), "entry ({r},{s})");
            }
        }
    }

    #[test]
    fn depolarizing_choi_by_definition() {
        // B_ij = δ_ij I/2 ⇒ C[(k,i),(l,j)] = δ_kl δ_ij / 2
        let oracle = DMatrix::from_fn(4, 4, |r, s| if r == s { c(0.5) } else { c(0.0) });
        let ch = choi_of(ChannelBlocks::completely_depolarizing(2, 2, &tol()).unwrap());
        assert!(max_diff(ch.matrix(), &oracle) < 1e-15);
    }

    #[test]
    fn transpose_map_is_not_cp() {
        let blocks = ChannelBlocks::<f64>::transpose(2, &tol()).unwrap();
        match ChoiMatrix::from_blocks(&blocks, &tol()) {
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => {
                assert_abs_diff_eq!(min_eigenvalue, -1.0, epsilon = 1e-12)
            }
            other => panic!("expected NotCompletelyPositive, got {other:?}"),
        }
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let blocks =
            ChannelBlocks::<f64>::from_map(2, 2, |x| x.scale(2.0), &Tolerances { trace: 10.0, ..tol() }).unwrap();
        assert!(matches!(ChoiMatrix::from_blocks(&blocks, &tol()), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn apply_examples() {
        let t = tol();
        let rho = DensityMatrix::diagonal(&[0.3, 0.7], &t).unwrap();
        let id = choi_of(ChannelBlocks::identity(2, &t).unwrap());
        assert!(max_diff(apply_channel(&id, &rho, &t).unwrap().matrix(), rho.matrix()) < 1e-15);

        let zero = DensityMatrix::diagonal(&[1.0, 0.0], &t).unwrap();
        let dep = choi_of(ChannelBlocks::completely_depolarizing(2, 2, &t).unwrap());
        let out = apply_channel(&dep, &zero, &t).unwrap();
        assert!(max_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-15);

        let x = choi_of(ChannelBlocks::unitary(&pauli_x(), &t).unwrap());
        let out = apply_channel(&x, &zero, &t).unwrap();
        assert!(max_diff(out.matrix(), &real(2, &[0.0, 0.0, 0.0, 1.0])) < 1e-15);

        let wrong = DensityMatrix::maximally_mixed(3, &t).unwrap();
        assert!(matches!(apply_channel(&id, &wrong, &t), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kraus_of_identity_is_single_unitary() {
        let t = tol();
        let k = kraus_from_choi(&choi_of(ChannelBlocks::identity(2, &t).unwrap()), &t).unwrap();
        assert_eq!(k.len(), 1);
        // eigenvector phase is arbitrary: V = e^{iφ} I
        let v = &k.ops()[0];
        let phase = v[(0, 0)];
        assert_abs_diff_eq!(phase.norm(), 1.0, epsilon = 1e-12);
        assert!(max_diff(&v.map(|z| z / phase), &identity(2)) < 1e-12);
    }

    #[test]
    fn kraus_of_depolarizing() {
        let t = tol();
        let k = kraus_from_choi(&choi_of(ChannelBlocks::completely_depolarizing(2, 2, &t).unwrap()), &t).unwrap();
        assert_eq!(k.len(), 4);
        for v in k.ops() {
            assert_abs_diff_eq!(v.norm_squared(), 0.5, epsilon = 1e-12);
        }
        let rho = DensityMatrix::diagonal(&[0.9, 0.1], &t).unwrap();
        let out = apply_kraus(&k, &rho, &t).unwrap();
        assert!(max_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-12);
    }

    #[test]
    fn kraus_of_even_pauli_mixture() {
        let t = tol();
        let id = choi_of(ChannelBlocks::identity(2, &t).unwrap());
        let x = choi_of(ChannelBlocks::unitary(&pauli_x(), &t).unwrap());
        let mix = (id.matrix() + x.matrix()).scale(0.5);
        let ch = ChoiMatrix::from_matrix(2, 2, mix, &t).unwrap();
        let k = kraus_from_choi(&ch, &t).unwrap();
        assert_eq!(k.len(), 2);
        // degenerate eigenvalues: the pair is {I/√2, X/√2} up to a unitary mix,
        // so compare the channel and the operator span
        for v in k.ops() {
            assert_abs_diff_eq!(v.norm_squared(), 1.0, epsilon = 1e-12);
            assert!(v[(0, 0)].norm() > 0.0 || v[(0, 1)].norm() > 0.0);
            assert!((v[(0, 0)] - v[(1, 1)]).norm() < 1e-12);
            assert!((v[(0, 1)] - v[(1, 0)]).norm() < 1e-12);
        }
        let zero = DensityMatrix::diagonal(&[1.0, 0.0], &t).unwrap();
        let out = apply_kraus(&k, &zero, &t).unwrap();
        assert!(max_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-12);
    }

    #[test]
    fn apply_kraus_examples() {
        let t = tol();
        let rho = DensityMatrix::pure(&[c(0.6), Complex::new(0.0, 0.8)], &t).unwrap();
        let id = KrausSet::new(vec![identity(2)]).unwrap();
        assert!(max_diff(apply_kraus(&id, &rho, &t).unwrap().matrix(), rho.matrix()) < 1e-15);

        let reset = KrausSet::new(vec![real(2, &[1.0, 0.0, 0.0, 0.0]), real(2, &[0.0, 1.0, 0.0, 0.0])]).unwrap();
        let out = apply_kraus(&reset, &rho, &t).unwrap();
        assert!(max_diff(out.matrix(), &real(2, &[1.0, 0.0, 0.0, 0.0])) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mix = KrausSet::new(vec![identity(2).scale(s), pauli_x().scale(s)]).unwrap();
        let zero = DensityMatrix::diagonal(&[1.0, 0.0], &t).unwrap();
        let out = apply_kraus(&mix, &zero, &t).unwrap();
        assert!(max_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-15);

        let short = KrausSet::new(vec![real(2, &[1.0, 0.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(apply_kraus(&short, &zero, &t), Err(Error::IncompleteKrausSet { .. })));
    }

    #[test]
    fn jam_state_examples() {
        let t = tol();
        let id = choi_of(ChannelBlocks::identity(2, &t).unwrap());
        let half = DensityMatrix::maximally_mixed(2, &t).unwrap();
        let js = jam_state(&id, &half, &t).unwrap();
        assert!(max_diff(js.matrix(), &id.matrix().scale(0.5)) < 1e-15);

        let dep = choi_of(ChannelBlocks::completely_depolarizing(2, 2, &t).unwrap());
        let js = jam_state(&dep, &half, &t).unwrap();
        assert!(max_diff(js.matrix(), &identity(4).scale(0.25)) < 1e-15);

        let sigma = DensityMatrix::diagonal(&[0.2, 0.8], &t).unwrap();
        let js = jam_state(&dep, &sigma, &t).unwrap();
        assert_abs_diff_eq!(js.matrix().trace().re, 1.0, epsilon = 1e-14);
        let reduced = partial_trace_b(js.matrix(), 2, 2);
        assert!(max_diff(&reduced, sigma.matrix()) < 1e-14);
    }

    #[test]
    fn jam_state_rejects_bad_sigma() {
        let t = tol();
        let id = choi_of(ChannelBlocks::identity(2, &t).unwrap());
        let pure = DensityMatrix::diagonal(&[1.0, 0.0], &t).unwrap();
        assert_eq!(jam_state(&id, &pure, &t).unwrap_err(), Error::SigmaNotFullRank);
        let plus = DensityMatrix::pure(&[c(1.0), c(1.0)], &t).unwrap();
        assert_eq!(jam_state(&id, &plus, &t).unwrap_err(), Error::SigmaNotDiagonal);
    }

    #[test]
    fn recover_round_trips() {
        let t = tol();
        let id = choi_of(ChannelBlocks::identity(2, &t).unwrap());
        let lambda = [0.6, 0.4];
        let sigma = DensityMatrix::diagonal(&lambda, &t).unwrap();
        let blocks = recover_blocks(&jam_state(&id, &sigma, &t).unwrap(), &lambda, &t).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = DMatrix::zeros(2, 2);
                unit[(i, j)] = c(1.0);
                assert!(max_diff(blocks.block(i, j), &unit) < 1e-14);
            }
        }

        let dep = choi_of(ChannelBlocks::completely_depolarizing(2, 2, &t).unwrap());
        let half = [0.5, 0.5];
        let sigma = DensityMatrix::diagonal(&half, &t).unwrap();
        let blocks = recover_blocks(&jam_state(&dep, &sigma, &t).unwrap(), &half, &t).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { identity(2).scale(0.5) } else { DMatrix::zeros(2, 2) };
                assert!(max_diff(blocks.block(i, j), &expect) < 1e-14);
            }
        }
    }

    #[test]
    fn recover_rejects_zero_eigenvalue() {
        let t = tol();
        let rho = DensityMatrix::maximally_mixed(4, &t).unwrap();
        assert!(matches!(recover_blocks(&rho, &[1.0, 0.0], &t), Err(Error::EigenvalueUnderflow { .. })));
    }

    #[test]
    fn basis_change_identity_and_orthogonal() {
        let t = tol();
        let x = choi_of(ChannelBlocks::unitary(&pauli_x(), &t).unwrap());
        let same = basis_change(&x, &identity(2), &t).unwrap();
        assert!(max_diff(same.matrix(), x.matrix()) < 1e-15);

        let (s, co) = (0.3f64.sin(), 0.3f64.cos());
        let rot = real(2, &[co, -s, s, co]);
        let rotated = basis_change(&x, &rot, &t).unwrap();
        assert_abs_diff_eq!(rotated.norm(&t).unwrap(), x.norm(&t).unwrap(), epsilon = 1e-12);

        let not_unitary = real(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(basis_change(&x, &not_unitary, &t), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn partial_transpose_of_omega_is_swap() {
        let t = tol();
        let id = choi_of(ChannelBlocks::identity(2, &t).unwrap());
        let pt = partial_transpose_a(id.matrix(), 2, 2);
        let swap = DMatrix::from_fn(4, 4, |r, s| {
            let (k, i) = (r / 2, r % 2);
            if s == i * 2 + k {
                c(1.0)
            } else {
                c(0.0)
            }
        });
        assert!(max_diff(&pt, &swap) < 1e-15);
    }

    #[test]
    fn density_validation() {
        let t = tol();
        assert!(DensityMatrix::diagonal(&[0.5, 0.6], &t).is_err());
        assert!(DensityMatrix::diagonal(&[1.2, -0.2], &t).is_err());
        assert!(DensityMatrix::new(real(2, &[0.5, 1.0, 0.0, 0.5]), &t).is_err());
    }
}
