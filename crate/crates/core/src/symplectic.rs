//! Symplectic linear algebra for Gaussian channels
//! `Φ*(W_B(z)) = W_A(Kz) exp(−½ zᵗμz)`.
//!
//! Phase space `Z = R^{2s}` is ordered `(q₁, p₁, …, q_s, p_s)` and carries the
//! form `Δ = diag[[0, −1], [1, 0]]`. The noise commutator form of a channel
//! is `Δ_K = Δ_B − KᵗΔ_A K`, and a pair `(μ, Δ_K)` is admissible iff
//! `μ ± (i/2)Δ_K ⪰ 0`.

use nalgebra::{Complex, DMatrix};

use crate::matkernel::{
    hermitian_eig, max_abs, min_eigenvalue, operator_norm, rank_above, real_symmetric_eig, to_complex, RealMatrix,
};
use crate::{Error, Real, Result, Tolerances};

/// Standard symplectic form on `s` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm<T: Real> {
    s: usize,
    delta: RealMatrix<T>,
}

impl<T: Real> SymplecticForm<T> {
    pub fn modes(&self) -> usize {
        self.s
    }

    pub fn matrix(&self) -> &RealMatrix<T> {
        &self.delta
    }

    pub fn into_matrix(self) -> RealMatrix<T> {
        self.delta
    }
}

/// `diag[[0, −1], [1, 0]]` repeated `s` times.
pub fn std_delta<T: Real>(s: usize) -> Result<SymplecticForm<T>> {
    if s == 0 {
        return Err(Error::ZeroModes);
    }
    let mut delta = DMatrix::zeros(2 * s, 2 * s);
    for j in 0..s {
        delta[(2 * j, 2 * j + 1)] = -T::one();
        delta[(2 * j + 1, 2 * j)] = T::one();
    }
    Ok(SymplecticForm { s, delta })
}

fn delta_matrix<T: Real>(s: usize) -> RealMatrix<T> {
    if s == 0 {
        DMatrix::zeros(0, 0)
    } else {
        std_delta(s).expect("s > 0").into_matrix()
    }
}

/// Gaussian channel parameters: `K` is `2s_A × 2s_B`, `μ` is `2s_B × 2s_B`
/// and symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianChannelSpec<T: Real> {
    s_a: usize,
    s_b: usize,
    k: RealMatrix<T>,
    mu: RealMatrix<T>,
}

impl<T: Real> GaussianChannelSpec<T> {
    /// Checks shapes and finiteness, requires `|μ − μᵗ| ≤ tol.symmetry ·
    /// (1 + |μ|)` entrywise, and stores the symmetrized `μ`.
    pub fn new(s_a: usize, s_b: usize, k: RealMatrix<T>, mu: RealMatrix<T>, tol: &Tolerances) -> Result<Self> {
        if s_b == 0 {
            return Err(Error::ZeroModes);
        }
        if k.nrows() != 2 * s_a || k.ncols() != 2 * s_b {
            return Err(Error::DimensionMismatch(format!(
                "K is {}x{}, expected {}x{}",
                k.nrows(),
                k.ncols(),
                2 * s_a,
                2 * s_b
            )));
        }
        if mu.nrows() != 2 * s_b || mu.ncols() != 2 * s_b {
            return Err(Error::DimensionMismatch(format!(
                "mu is {}x{}, expected {}x{}",
                mu.nrows(),
                mu.ncols(),
                2 * s_b,
                2 * s_b
            )));
        }
        crate::matkernel::check_finite(&k)?;
        crate::matkernel::check_finite(&mu)?;
        let asym = max_abs(&(&mu - mu.transpose()));
        if asym > T::lit(tol.symmetry) * (T::one() + max_abs(&mu)) {
            return Err(Error::InvalidChannel(format!("mu is not symmetric (defect {:e})", asym.as_f64())));
        }
        let mu = (&mu + mu.transpose()).scale(T::lit(0.5));
        Ok(Self { s_a, s_b, k, mu })
    }

    /// One-mode channel `K = kI₂`, `μ = mI₂`.
    pub fn one_mode(k: T, m: T, tol: &Tolerances) -> Result<Self> {
        let id = DMatrix::<T>::identity(2, 2);
        Self::new(1, 1, id.scale(k), id.scale(m), tol)
    }

    pub fn s_a(&self) -> usize {
        self.s_a
    }

    pub fn s_b(&self) -> usize {
        self.s_b
    }

    pub fn k(&self) -> &RealMatrix<T> {
        &self.k
    }

    pub fn mu(&self) -> &RealMatrix<T> {
        &self.mu
    }
}

/// `Δ_K = Δ_B − KᵗΔ_A K`.
pub fn delta_k<T: Real>(spec: &GaussianChannelSpec<T>) -> RealMatrix<T> {
    let delta_b = delta_matrix::<T>(spec.s_b);
    let delta_a = delta_matrix::<T>(spec.s_a);
    let kt = spec.k.transpose();
    delta_b - &kt * delta_a * &spec.k
}

/// `μ + (i/2)Δ` as a Hermitian matrix.
pub fn noise_form<T: Real>(mu: &RealMatrix<T>, delta: &RealMatrix<T>, sign: T) -> crate::matkernel::DenseMatrix<T> {
    let half = sign * T::lit(0.5);
    DMatrix::from_fn(mu.nrows(), mu.ncols(), |i, j| Complex::new(mu[(i, j)], half * delta[(i, j)]))
}

/// Outcome of the admissibility check `μ + (i/2)Δ_K ⪰ −tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub valid: bool,
    pub min_eigenvalue: f64,
}

pub fn validate<T: Real>(spec: &GaussianChannelSpec<T>, tol: &Tolerances) -> Result<Verdict> {
    let form = noise_form(&spec.mu, &delta_k(spec), T::one());
    let lo = min_eigenvalue(&form, tol)?;
    Ok(Verdict { valid: lo >= -T::lit(tol.psd), min_eigenvalue: lo.as_f64() })
}

/// Common magnitude used for every rank decision on a pair.
fn pair_scale<T: Real>(mu: &RealMatrix<T>, delta_k: &RealMatrix<T>) -> T {
    let a = operator_norm(mu);
    let b = operator_norm(delta_k) * T::lit(0.5);
    let m = if a > b { a } else { b };
    if m > T::zero() {
        m
    } else {
        T::one()
    }
}

fn stable_rank<N: nalgebra::ComplexField>(
    m: &DMatrix<N>,
    scale: N::RealField,
    tol: &Tolerances,
    what: &'static str,
) -> Result<usize>
where
    N::RealField: Real,
{
    let low = rank_above(m, scale * <N::RealField as Real>::lit(tol.rank))?;
    let high = rank_above(m, scale * <N::RealField as Real>::lit(tol.rank_stability))?;
    if low != high {
        return Err(Error::RankInstability { what, low, high });
    }
    Ok(low)
}

/// Symplectic eigenvalues `μ_j`: the moduli of the eigenvalues `±iμ_j` of
/// `Δ_K⁻¹μ`, one per conjugate pair, in descending order.
pub fn symplectic_eigenvalues<T: Real>(
    mu: &RealMatrix<T>,
    delta_k: &RealMatrix<T>,
    tol: &Tolerances,
) -> Result<Vec<T>> {
    let n = crate::matkernel::check_square(delta_k)?;
    if mu.nrows() != n || mu.ncols() != n {
        return Err(Error::DimensionMismatch(format!("mu is {}x{}, Delta_K is {n}x{n}", mu.nrows(), mu.ncols())));
    }
    let rank = stable_rank(delta_k, pair_scale(mu, delta_k), tol, "Delta_K")?;
    if rank < n {
        return Err(Error::DegenerateDeltaK { rank, dim: n });
    }
    let inv = delta_k.clone().try_inverse().ok_or(Error::DegenerateDeltaK { rank, dim: n })?;
    let ev = (inv * mu).complex_eigenvalues();
    let mut mods: Vec<T> = ev.iter().map(|z| z.im.abs()).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(mods.into_iter().step_by(2).collect())
}

/// Generalized Williamson normal form of a pair `(μ, Δ_K)`.
///
/// Columns of `t` are ordered as: mixed modes (`μ_j > ½`, descending), pure
/// modes (`μ_j = ½`), then `d₃` directions where `μ = I/2, Δ_K = 0`, then
/// `d₄` directions where `μ = Δ_K = 0`. Each mode contributes the column
/// pair `(q, p)` with `Tᵗ Δ_K T = [[0, −1], [1, 0]]` on it.
#[derive(Clone, Debug)]
pub struct WilliamsonResult<T: Real> {
    pub t: RealMatrix<T>,
    /// Symplectic eigenvalues of the mixed and pure modes, in column order.
    pub sympl_eigs: Vec<T>,
    /// `(d₁, d₂, d₃, d₄)`.
    pub dims: [usize; 4],
    /// `(r_μ, r_ΔK, r_{μ−(i/2)Δ_K})`.
    pub ranks: (usize, usize, usize),
}

impl<T: Real> WilliamsonResult<T> {
    pub fn modes(&self) -> usize {
        self.t.nrows() / 2
    }

    /// Block form `TᵗμT` should equal.
    pub fn mu_normal_form(&self) -> RealMatrix<T> {
        let n = self.t.nrows();
        let mut out = DMatrix::zeros(n, n);
        for (j, &m) in self.sympl_eigs.iter().enumerate() {
            out[(2 * j, 2 * j)] = m;
            out[(2 * j + 1, 2 * j + 1)] = m;
        }
        let start = self.dims[0] + self.dims[1];
        for i in start..start + self.dims[2] {
            out[(i, i)] = T::lit(0.5);
        }
        out
    }

    /// Block form `TᵗΔ_K T` should equal.
    pub fn delta_normal_form(&self) -> RealMatrix<T> {
        let n = self.t.nrows();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..self.sympl_eigs.len() {
            out[(2 * j, 2 * j + 1)] = -T::one();
            out[(2 * j + 1, 2 * j)] = T::one();
        }
        out
    }

    /// Column ranges of the four groups.
    pub fn group_ranges(&self) -> [std::ops::Range<usize>; 4] {
        let [d1, d2, d3, d4] = self.dims;
        [0..d1, d1..d1 + d2, d1 + d2..d1 + d2 + d3, d1 + d2 + d3..d1 + d2 + d3 + d4]
    }

    pub fn mixed_eigs(&self) -> &[T] {
        &self.sympl_eigs[..self.dims[0] / 2]
    }
}

pub fn williamson<T: Real>(
    mu: &RealMatrix<T>,
    delta_k: &RealMatrix<T>,
    tol: &Tolerances,
) -> Result<WilliamsonResult<T>> {
    let n = crate::matkernel::check_square(mu)?;
    if n == 0 || n % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("phase space of dimension {n}")));
    }
    if delta_k.nrows() != n || delta_k.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Delta_K is {}x{}, mu is {n}x{n}",
            delta_k.nrows(),
            delta_k.ncols()
        )));
    }
    let skew = max_abs(&(delta_k + delta_k.transpose()));
    if skew > T::lit(tol.hermitian) * (T::one() + max_abs(delta_k)) {
        return Err(Error::InvalidChannel(format!("Delta_K is not skew-symmetric (defect {:e})", skew.as_f64())));
    }
    let delta_k = (delta_k - delta_k.transpose()).scale(T::lit(0.5));

    let form = noise_form(mu, &delta_k, -T::one());
    let lo = min_eigenvalue(&form, tol)?;
    if lo < -T::lit(tol.psd) {
        return Err(Error::InvalidPair { min_eigenvalue: lo.as_f64() });
    }

    let scale = pair_scale(mu, &delta_k);
    let r_mu = stable_rank(mu, scale, tol, "mu")?;
    let r_dk = stable_rank(&delta_k, scale, tol, "Delta_K")?;
    let r_c = stable_rank(&form, scale, tol, "mu - (i/2) Delta_K")?;
    if r_dk % 2 != 0 {
        return Err(Error::InconsistentRanks { r_mu, r_dk, r_c });
    }
    if r_dk > r_mu || r_c > r_mu || 2 * (r_mu - r_c) > r_dk {
        return Err(Error::InconsistentRanks { r_mu, r_dk, r_c });
    }
    let d2 = 2 * (r_mu - r_c);
    let dims = [r_dk - d2, d2, r_mu - r_dk, n - r_mu];

    // whiten the range of μ; ker μ ⊂ ker Δ_K
    let eig = real_symmetric_eig(mu, tol)?;
    let range: Vec<usize> = (n - r_mu..n).collect();
    let b1 = DMatrix::from_fn(n, r_mu, |i, c| {
        let col = range[c];
        eig.vectors[(i, col)] / eig.values[col].sqrt()
    });
    let dp = b1.transpose() * &delta_k * &b1;

    // modes from the positive spectrum of iΔ'
    let h = to_complex(&dp).map(|z| Complex::new(T::zero(), T::one()) * z);
    let heig = hermitian_eig(&h, tol)?;
    let n_modes = r_dk / 2;
    let sqrt2 = T::lit(2.0).sqrt();
    let mut modes: Vec<(T, nalgebra::DVector<T>, nalgebra::DVector<T>)> = (0..n_modes)
        .map(|j| {
            let col = r_mu - 1 - j;
            let omega = heig.values[col];
            let v = heig.vectors.column(col);
            let e = v.map(|z| z.re * sqrt2);
            let f = v.map(|z| z.im * sqrt2);
            (omega, e, f)
        })
        .collect();
    if let Some((omega, _, _)) = modes.last() {
        if *omega <= T::zero() {
            return Err(Error::InconsistentRanks { r_mu, r_dk, r_c });
        }
    }
    // largest μ_j = 1/ω first
    modes.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));

    let window = T::lit(tol.pure_window);
    let half = T::lit(0.5);
    let pure = modes.iter().filter(|(w, _, _)| (T::one() / *w - half).abs() <= window).count();
    if 2 * pure != d2 {
        return Err(Error::RankInstability { what: "pure modes", low: d2 / 2, high: pure });
    }

    let mut t = DMatrix::zeros(n, n);
    let mut sympl_eigs = Vec::with_capacity(n_modes);
    let mut col = 0;
    let mixed = modes.iter().filter(|(w, _, _)| (T::one() / *w - half).abs() > window);
    let pure_modes = modes.iter().filter(|(w, _, _)| (T::one() / *w - half).abs() <= window);
    for (omega, e, f) in mixed.chain(pure_modes) {
        let s = T::one() / omega.sqrt();
        t.set_column(col, &(&b1 * e).scale(s));
        t.set_column(col + 1, &(&b1 * f).scale(s));
        sympl_eigs.push(T::one() / *omega);
        col += 2;
    }

    // ker Δ' inside the whitened range: μ-block I/2
    if dims[2] > 0 {
        let mut p = DMatrix::<T>::identity(r_mu, r_mu);
        for (_, e, f) in &modes {
            p -= e * e.transpose() + f * f.transpose();
        }
        let peig = real_symmetric_eig(&p, &Tolerances { hermitian: 1e-6, ..*tol })?;
        let inv_sqrt2 = T::one() / sqrt2;
        for j in 0..dims[2] {
            let g = peig.vectors.column(r_mu - 1 - j);
            t.set_column(col, &(&b1 * g).scale(inv_sqrt2));
            col += 1;
        }
    }

    for j in 0..dims[3] {
        t.set_column(col, &eig.vectors.column(j));
        col += 1;
    }
    debug_assert_eq!(col, n);

    Ok(WilliamsonResult { t, sympl_eigs, dims, ranks: (r_mu, r_dk, r_c) })
}

/// Splitting of `Z_B + Z_A` into `Z̃₁ ⊕ Z̃₂ ⊕ Z̃′₃ ⊕ Z̃′₄ ⊕ Z₀`, each group
/// given by basis columns in `R^{2s_B + 2s_A}` (B coordinates first).
#[derive(Clone, Debug)]
pub struct ExtendedDecomposition<T: Real> {
    pub delta_ab: RealMatrix<T>,
    pub groups: [RealMatrix<T>; 5],
}

impl<T: Real> ExtendedDecomposition<T> {
    /// `G_iᵗ Δ_AB G_j`.
    pub fn block(&self, i: usize, j: usize) -> RealMatrix<T> {
        self.groups[i].transpose() * &self.delta_ab * &self.groups[j]
    }

    pub fn group_dims(&self) -> [usize; 5] {
        std::array::from_fn(|i| self.groups[i].ncols())
    }

    /// Largest entry of `Δ_AB` between distinct groups.
    pub fn max_cross_block(&self) -> T {
        let mut worst = T::zero();
        for i in 0..5 {
            for j in 0..5 {
                if i != j && self.groups[i].ncols() > 0 && self.groups[j].ncols() > 0 {
                    worst = worst.max(max_abs(&self.block(i, j)));
                }
            }
        }
        worst
    }

    /// All basis columns, grouped in order.
    pub fn basis(&self) -> RealMatrix<T> {
        let n = self.delta_ab.nrows();
        let cols: Vec<_> = self.groups.iter().flat_map(|g| g.column_iter()).collect();
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}

/// `Δ_AB = [[I, Kᵗ], [0, I]] · diag(Δ_B, −Δ_A) · [[I, 0], [K, I]]`.
pub fn delta_ab<T: Real>(spec: &GaussianChannelSpec<T>) -> RealMatrix<T> {
    let (nb, na) = (2 * spec.s_b, 2 * spec.s_a);
    let n = nb + na;
    let mut left = DMatrix::<T>::identity(n, n);
    left.view_mut((0, nb), (nb, na)).copy_from(&spec.k.transpose());
    let mut mid = DMatrix::<T>::zeros(n, n);
    mid.view_mut((0, 0), (nb, nb)).copy_from(&delta_matrix::<T>(spec.s_b));
    mid.view_mut((nb, nb), (na, na)).copy_from(&(-delta_matrix::<T>(spec.s_a)));
    let mut right = DMatrix::<T>::identity(n, n);
    right.view_mut((nb, 0), (na, nb)).copy_from(&spec.k);
    left * mid * right
}

/// Extends the Williamson basis of `Z_B` to `Z_B + Z_A`: each degenerate
/// direction `ẽ_j` (groups 3 and 4) is paired with an isotropic `h_j` with
/// `Δ_AB(ẽ_j, h_k) = δ_jk`, and `Z₀` is the `Δ_AB`-orthogonal complement.
pub fn extend_decomposition<T: Real>(
    spec: &GaussianChannelSpec<T>,
    w: &WilliamsonResult<T>,
    tol: &Tolerances,
) -> Result<ExtendedDecomposition<T>> {
    let nb = 2 * spec.s_b;
    if w.t.nrows() != nb {
        return Err(Error::DimensionMismatch(format!("Williamson basis has {} rows for 2s_B = {nb}", w.t.nrows())));
    }
    let verdict = validate(spec, tol)?;
    if !verdict.valid {
        return Err(Error::InvalidPair { min_eigenvalue: verdict.min_eigenvalue });
    }
    let dab = delta_ab(spec);
    let n = dab.nrows();
    let embed = |range: std::ops::Range<usize>| {
        let mut g = DMatrix::<T>::zeros(n, range.len());
        for (c, j) in range.enumerate() {
            g.view_mut((0, c), (nb, 1)).copy_from(&w.t.column(j));
        }
        g
    };
    let [r1, r2, r3, r4] = w.group_ranges();
    let z1 = embed(r1);
    let z2 = embed(r2);
    let e = embed(0..w.dims[0] + w.dims[1]);
    let f = embed(r3.start..r4.end);
    let m = f.ncols();
    let (d3, _) = (w.dims[2], w.dims[3]);

    let (z3, z4, h) = if m == 0 {
        (DMatrix::zeros(n, 0), DMatrix::zeros(n, 0), DMatrix::zeros(n, 0))
    } else {
        // [Fᵗ; Eᵗ] Δ_AB H = [I; 0], minimum-norm solution
        let mut lhs = DMatrix::<T>::zeros(m + e.ncols(), n);
        lhs.view_mut((0, 0), (m, n)).copy_from(&(f.transpose() * &dab));
        if e.ncols() > 0 {
            lhs.view_mut((m, 0), (e.ncols(), n)).copy_from(&(e.transpose() * &dab));
        }
        let mut rhs = DMatrix::<T>::zeros(m + e.ncols(), m);
        rhs.view_mut((0, 0), (m, m)).fill_with_identity();
        // lhs has full row rank (T is nondegenerate, so is Δ_AB): with
        // lhsᵗ = QR the minimum-norm solution is Q R⁻ᵗ rhs
        let qr = lhs.transpose().qr();
        let r = qr.r();
        let floor = T::lit(tol.rank) * (T::one() + operator_norm(&lhs));
        if r.diagonal().iter().any(|d| d.abs() <= floor) {
            return Err(Error::InvalidChannel("cannot pair degenerate directions".into()));
        }
        let y = r
            .transpose()
            .solve_lower_triangular(&rhs)
            .ok_or_else(|| Error::InvalidChannel("cannot pair degenerate directions".into()))?;
        let mut h = qr.q() * y;
        // make the h_j mutually Δ_AB-orthogonal without breaking the pairing
        let a = h.transpose() * &dab * &h;
        h += &f * a.scale(T::lit(0.5));
        let mut z3 = DMatrix::zeros(n, 2 * d3);
        let mut z4 = DMatrix::zeros(n, 2 * (m - d3));
        for j in 0..d3 {
            z3.set_column(2 * j, &f.column(j));
            z3.set_column(2 * j + 1, &h.column(j));
        }
        for j in d3..m {
            z4.set_column(2 * (j - d3), &f.column(j));
            z4.set_column(2 * (j - d3) + 1, &h.column(j));
        }
        (z3, z4, h)
    };

    // Z₀: null space of [E F H]ᵗ Δ_AB
    let used = e.ncols() + 2 * m;
    let z0 = if used >= n {
        DMatrix::zeros(n, 0)
    } else {
        let mut cols: Vec<_> = e.column_iter().collect();
        cols.extend(f.column_iter());
        cols.extend(h.column_iter());
        let c = DMatrix::from_columns(&cols).transpose() * &dab;
        let gram = c.transpose() * &c;
        let geig = real_symmetric_eig(&gram, &Tolerances { hermitian: 1e-6, ..*tol })?;
        DMatrix::from_fn(n, n - used, |i, j| geig.vectors[(i, j)])
    };

    Ok(ExtendedDecomposition { delta_ab: dab, groups: [z1, z2, z3, z4, z0] })
}
