//! Sparse assembly and block-diagonal Hermitian operators.
//!
//! Two-mode Fock-space operators have dimension `N²` but split into many
//! small invariant blocks. [`SparseMatrix`] is used to assemble such
//! operators from single-mode matrices; [`BlockHermitian`] finds the
//! connected components of the nonzero pattern and stores one dense block
//! per component, so spectral functions cost `Σ b³` instead of `N⁶`.

use std::collections::BTreeMap;

use nalgebra::{Complex, ComplexField, DMatrix};

use super::{hermitian_eig, DenseMatrix, EigResult};
use crate::{Error, Real, Result, Tolerances};

/// Row-compressed sparse complex matrix with sorted column maps.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T: Real> {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, Complex<T>>>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, rows: vec![BTreeMap::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].insert(i, Complex::from(T::one()));
        }
        m
    }

    /// Keeps the exactly-nonzero entries of a dense matrix.
    pub fn from_dense(d: &DenseMatrix<T>) -> Self {
        let mut m = Self::zeros(d.nrows(), d.ncols());
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                let v = d[(i, j)];
                if v != Complex::from(T::zero()) {
                    m.rows[i].insert(j, v);
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.rows[i].get(&j).copied().unwrap_or_else(|| Complex::from(T::zero()))
    }

    /// Adds `v` to entry `(i, j)`, dropping it if the sum is exactly zero.
    pub fn add_at(&mut self, i: usize, j: usize, v: Complex<T>) {
        let zero = Complex::from(T::zero());
        let slot = self.rows[i].entry(j).or_insert(zero);
        *slot += v;
        if *slot == zero {
            self.rows[i].remove(&j);
        }
    }

    /// Drops entries with modulus at most `threshold`.
    pub fn prune(&mut self, threshold: T) {
        for row in &mut self.rows {
            row.retain(|_, v| v.modulus() > threshold);
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.triplets().fold(T::zero(), |a, (_, _, v)| a.max(v.modulus()))
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |(&j, &v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.ncols, self.nrows);
        for (i, j, v) in self.triplets() {
            m.rows[j].insert(i, v.conj());
        }
        m
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut m = self.clone();
        for row in &mut m.rows {
            for v in row.values_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut m = self.clone();
        for (i, j, v) in other.triplets() {
            m.add_at(i, j, v);
        }
        Ok(m)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::from(-T::one())))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "sparse product {}x{} * {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut m = Self::zeros(self.nrows, other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for (&k, &a) in row {
                for (&j, &b) in &other.rows[k] {
                    m.add_at(i, j, a * b);
                }
            }
        }
        Ok(m)
    }

    /// `self ⊗ other`, row index `i_self * other.nrows() + i_other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.nrows * other.nrows, self.ncols * other.ncols);
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                m.rows[i * other.nrows + k].insert(j * other.ncols + l, a * b);
            }
        }
        m
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(())
    }
}

/// One invariant block: the sorted global indices it occupies and the
/// dense submatrix on them.
#[derive(Clone, Debug)]
pub struct HermitianBlock<T: Real> {
    pub indices: Vec<usize>,
    pub matrix: DenseMatrix<T>,
}

/// Hermitian operator stored as a direct sum of dense blocks.
#[derive(Clone, Debug)]
pub struct BlockHermitian<T: Real> {
    dim: usize,
    blocks: Vec<HermitianBlock<T>>,
    /// `position[g] = (block, local index)` for every global index `g`.
    position: Vec<(usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl<T: Real> BlockHermitian<T> {
    /// Splits a Hermitian sparse matrix into the connected components of
    /// its nonzero pattern.
    pub fn from_sparse(m: &SparseMatrix<T>, tol: &Tolerances) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let n = m.nrows();
        let mut scale = T::zero();
        let mut defect = T::zero();
        for (i, j, v) in m.triplets() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            scale = scale.max(v.modulus());
            defect = defect.max((v - m.get(j, i).conj()).modulus());
        }
        if defect > T::lit(tol.hermitian) * (T::one() + scale) {
            return Err(Error::NonHermitian { defect: defect.as_f64() });
        }

        let mut parent: Vec<usize> = (0..n).collect();
        for (i, j, _) in m.triplets() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }

        let mut position = vec![(0, 0); n];
        let mut blocks = Vec::with_capacity(groups.len());
        for (b, indices) in groups.into_values().enumerate() {
            for (local, &g) in indices.iter().enumerate() {
                position[g] = (b, local);
            }
            let size = indices.len();
            let mut matrix = DMatrix::zeros(size, size);
            for (r, &gi) in indices.iter().enumerate() {
                for (&gj, &v) in &m.rows[gi] {
                    let (_, c) = position[gj];
                    matrix[(r, c)] = v;
                }
            }
            let matrix = (&matrix + matrix.adjoint()).scale(T::lit(0.5));
            blocks.push(HermitianBlock { indices, matrix });
        }
        Ok(Self { dim: n, blocks, position })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[HermitianBlock<T>] {
        &self.blocks
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }

    /// Entry `(i, j)`; zero across blocks.
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        let (bi, li) = self.position[i];
        let (bj, lj) = self.position[j];
        if bi == bj {
            self.blocks[bi].matrix[(li, lj)]
        } else {
            Complex::from(T::zero())
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// Nonzero-pattern entries, block by block.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        self.blocks.iter().flat_map(|b| {
            b.indices
                .iter()
                .enumerate()
                .flat_map(move |(r, &gi)| b.indices.iter().enumerate().map(move |(c, &gj)| (gi, gj, b.matrix[(r, c)])))
        })
    }

    pub fn to_sparse(&self) -> SparseMatrix<T> {
        let mut m = SparseMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            if v != Complex::from(T::zero()) {
                m.rows[i].insert(j, v);
            }
        }
        m
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// `D · M · D` for a real diagonal `D` given by its entries.
    pub fn conjugate_by_diagonal(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "diagonal of length {} for operator of dimension {}",
                d.len(),
                self.dim
            )));
        }
        let mut out = self.clone();
        for b in &mut out.blocks {
            for (r, &gi) in b.indices.iter().enumerate() {
                for (c, &gj) in b.indices.iter().enumerate() {
                    b.matrix[(r, c)] *= Complex::from(d[gi] * d[gj]);
                }
            }
        }
        Ok(out)
    }

    pub fn eig(&self, tol: &Tolerances) -> Result<BlockSpectrum<T>> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Ok((b.indices.clone(), hermitian_eig(&b.matrix, tol)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockSpectrum { dim: self.dim, blocks, position: self.position.clone() })
    }
}

/// Block-wise eigendecomposition of a [`BlockHermitian`].
#[derive(Clone, Debug)]
pub struct BlockSpectrum<T: Real> {
    dim: usize,
    blocks: Vec<(Vec<usize>, EigResult<T>)>,
    position: Vec<(usize, usize)>,
}

impl<T: Real> BlockSpectrum<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues, ascending.
    pub fn values(&self) -> Vec<T> {
        let mut v: Vec<T> = self.blocks.iter().flat_map(|(_, e)| e.values.iter().copied()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v
    }

    pub fn min(&self) -> T {
        self.blocks
            .iter()
            .filter_map(|(_, e)| e.values.iter().next().copied())
            .fold(T::max_value().expect("bounded"), |a, b| a.min(b))
    }

    pub fn max(&self) -> T {
        self.blocks
            .iter()
            .filter_map(|(_, e)| e.values.iter().last().copied())
            .fold(T::min_value().expect("bounded"), |a, b| a.max(b))
    }

    /// The operator `f(M)`, with the same block structure.
    pub fn map(&self, f: impl Fn(T) -> T) -> BlockHermitian<T> {
        let blocks = self
            .blocks
            .iter()
            .map(|(indices, e)| HermitianBlock { indices: indices.clone(), matrix: e.map_spectrum(&f) })
            .collect();
        BlockHermitian { dim: self.dim, blocks, position: self.position.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernel::{hermitian_eig, max_diff, to_complex};

    fn dense(rows: usize, data: &[f64]) -> DenseMatrix<f64> {
        to_complex(&DMatrix::from_row_slice(rows, data.len() / rows, data))
    }

    #[test]
    fn sparse_algebra_matches_dense() {
        let a = dense(2, &[0.0, 1.0, 2.0, 3.0]);
        let b = dense(2, &[1.0, -1.0, 0.0, 0.5]);
        let (sa, sb) = (SparseMatrix::from_dense(&a), SparseMatrix::from_dense(&b));
        assert!(max_diff(&sa.mul(&sb).unwrap().to_dense(), &(&a * &b)) < 1e-15);
        assert!(max_diff(&sa.kron(&sb).to_dense(), &a.kronecker(&b)) < 1e-15);
        assert!(max_diff(&sa.add(&sb).unwrap().to_dense(), &(&a + &b)) < 1e-15);
        assert!(max_diff(&sa.adjoint().to_dense(), &a.adjoint()) < 1e-15);
    }

    #[test]
    fn cancellation_drops_entries() {
        let a = SparseMatrix::<f64>::identity(3);
        assert_eq!(a.sub(&a).unwrap().nnz(), 0);
    }

    #[test]
    fn components_and_spectrum() {
        // two 2x2 blocks interleaved on indices {0,2} and {1,3}
        let m = dense(
            4,
            &[
                1.0, 0.0, 2.0, 0.0, //
                0.0, 5.0, 0.0, 1.0, //
                2.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 5.0,
            ],
        );
        let tol = Tolerances::default();
        let bh = BlockHermitian::from_sparse(&SparseMatrix::from_dense(&m), &tol).unwrap();
        assert_eq!(bh.blocks().len(), 2);
        assert_eq!(bh.largest_block(), 2);
        assert!(max_diff(&bh.to_dense(), &m) < 1e-15);

        let spec = bh.eig(&tol).unwrap();
        let dense_vals = hermitian_eig(&m, &tol).unwrap().values;
        for (a, b) in spec.values().iter().zip(dense_vals.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((spec.min() + 1.0).abs() < 1e-13);
        assert!((spec.max() - 6.0).abs() < 1e-13);

        let sq = spec.map(|x| x * x).to_dense();
        assert!(max_diff(&sq, &(&m * &m)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = dense(2, &[0.0, 1.0, 0.0, 0.0]);
        let r = BlockHermitian::from_sparse(&SparseMatrix::from_dense(&m), &Tolerances::default());
        assert!(matches!(r, Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn diagonal_conjugation() {
        let m = dense(2, &[1.0, 1.0, 1.0, 1.0]);
        let bh = BlockHermitian::from_sparse(&SparseMatrix::from_dense(&m), &Tolerances::default()).unwrap();
        let c = bh.conjugate_by_diagonal(&[2.0, 3.0]).unwrap().to_dense();
        assert!(max_diff(&c, &dense(2, &[4.0, 6.0, 6.0, 9.0])) < 1e-15);
    }
}
