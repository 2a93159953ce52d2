//! Dense complex matrices, Hermitian matrices and bipartite partial traces.
//!
//! Bipartite matrices are always laid out as `Y ⊗ X`: a matrix of size
//! `dY·dX` is a `dY × dY` grid of `dX × dX` blocks, and global index
//! `a·dX + i` refers to `|a⟩_Y ⊗ |i⟩_X`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative asymmetry accepted by [`HermitianMatrix::new`] before it
/// symmetrizes.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Real matrix from rows of equal length.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(r, c, entries)
    }

    pub(crate) fn from_dmatrix_unchecked(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.diagonal().iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok((&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.0.shape() != other.0.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.0.shape(),
                other.0.shape()
            )));
        }
        Ok(())
    }
}

/// Square complex matrix with `H = H†`, stored exactly symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `max|m - m†| ≤ 1e-12·(1 + max|m|)` and stores `(m + m†)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let adj = m.0.adjoint();
        let deviation = (&m.0 - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > HERMITIAN_TOL * (1.0 + m.max_abs()) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(m))
    }

    /// Projects onto the Hermitian part without checking the deviation.
    pub fn symmetrize(m: ComplexMatrix) -> Self {
        let adj = m.0.adjoint();
        Self(ComplexMatrix((&m.0 + adj) * C64::new(0.5, 0.0)))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0.get(r, c)
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.0
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0 .0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(C64::new(s, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.sub(&other.0)?))
    }

    /// Real linear combination `Σ cᵢ Hᵢ`; all terms must share a dimension.
    pub fn combination(coeffs: &[f64], terms: &[HermitianMatrix]) -> Result<Self> {
        let n = terms
            .first()
            .map(HermitianMatrix::dim)
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        if coeffs.len() != terms.len() {
            return Err(Error::DimensionMismatch("coefficient count".into()));
        }
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (c, t) in coeffs.iter().zip(terms) {
            if t.dim() != n {
                return Err(Error::DimensionMismatch("combination terms".into()));
            }
            acc += t.as_dmatrix() * C64::new(*c, 0.0);
        }
        Ok(Self(ComplexMatrix(acc)))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.0.max_diff(&other.0)
    }

    /// Eigenvalues (ascending) and eigenvectors (as columns, same order).
    pub fn eigh(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        let n = self.dim();
        if n == 0 {
            return Ok((Vec::new(), DMatrix::zeros(0, 0)));
        }
        let eig = SymmetricEigen::try_new(self.as_dmatrix().clone(), 1e-15, 10_000 + 100 * n)
            .ok_or(Error::EigenNonConvergence(n))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    /// Largest eigenvalue modulus.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|l| l.abs()).fold(0.0, f64::max))
    }

    /// `Σ f(λ) v v†` over the eigendecomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (vals, vecs) = self.eigh()?;
        let n = self.dim();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for (k, &l) in vals.iter().enumerate() {
            let w = f(l);
            if w == 0.0 {
                continue;
            }
            let v = vecs.column(k);
            out += (v * v.adjoint()) * C64::new(w, 0.0);
        }
        Ok(Self::symmetrize(ComplexMatrix(out)))
    }

    /// `U H U†`; `u` must be square of the same size.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.mul(&self.0)?.mul(&u.adjoint())?;
        Ok(Self::symmetrize(m))
    }

    /// Factor swap `Y ⊗ X → X ⊗ Y`.
    pub fn swap_factors(&self, dims: BipartiteDims) -> Result<Self> {
        Ok(Self(swap_factors(&self.0, dims)?))
    }
}

/// Hilbert–Schmidt pairing `tr(AB)` of two Hermitian matrices.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner of {}x{} and {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let (am, bm) = (a.as_dmatrix(), b.as_dmatrix());
    let mut acc = 0.0;
    for c in 0..am.ncols() {
        for r in 0..am.nrows() {
            acc += (am[(r, c)] * bm[(c, r)]).re;
        }
    }
    Ok(acc)
}

/// Dimensions of a bipartite space `Y ⊗ X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BipartiteDims {
    #[serde(rename = "dY")]
    pub dy: usize,
    #[serde(rename = "dX")]
    pub dx: usize,
}

impl BipartiteDims {
    pub fn new(dy: usize, dx: usize) -> Result<Self> {
        if dy == 0 || dx == 0 {
            return Err(Error::InvalidArgument("bipartite factors must be nonzero".into()));
        }
        Ok(Self { dy, dx })
    }

    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn total(&self) -> usize {
        self.dy * self.dx
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not {}x{} blocks of size {}",
                m.rows(),
                m.cols(),
                self.dy,
                self.dy,
                self.dx
            )));
        }
        Ok(())
    }
}

/// `tr_X`: entry `(a, b)` is the trace of block `H_ab`.
pub fn partial_trace_x(h: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check(h)?;
    let (dy, dx) = (dims.dy, dims.dx);
    let m = h.as_dmatrix();
    let out = DMatrix::from_fn(dy, dy, |a, b| (0..dx).map(|i| m[(a * dx + i, b * dx + i)]).sum());
    Ok(ComplexMatrix(out))
}

/// `tr_Y`: the sum of the diagonal blocks.
pub fn partial_trace_y(h: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check(h)?;
    let (dy, dx) = (dims.dy, dims.dx);
    let m = h.as_dmatrix();
    let out = DMatrix::from_fn(dx, dx, |i, j| (0..dy).map(|a| m[(a * dx + i, a * dx + j)]).sum());
    Ok(ComplexMatrix(out))
}

/// Reorders `Y ⊗ X` to `X ⊗ Y`.
pub fn swap_factors(h: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    dims.check(h)?;
    let (dy, dx) = (dims.dy, dims.dx);
    let m = h.as_dmatrix();
    let idx = |k: usize| {
        let (a, i) = (k / dx, k % dx);
        i * dy + a
    };
    let n = dims.total();
    let mut out = DMatrix::<C64>::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            out[(idx(r), idx(c))] = m[(r, c)];
        }
    }
    Ok(ComplexMatrix(out))
}

/// Eigenvalue counts of a Hermitian matrix at a fixed threshold.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<f64>,
    pub n_pos: usize,
    pub n_neg: usize,
    pub rank: usize,
    pub tolerance: f64,
}

/// Default rank threshold `1e-8 · max(1, ‖H‖_op)`.
pub fn default_rank_tolerance(op_norm: f64) -> f64 {
    1e-8 * op_norm.max(1.0)
}

pub fn spectral_summary(h: &HermitianMatrix, tau: f64) -> Result<SpectralSummary> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tau}")));
    }
    let eigenvalues = h.eigenvalues()?;
    let n_pos = eigenvalues.iter().filter(|&&l| l > tau).count();
    let n_neg = eigenvalues.iter().filter(|&&l| l < -tau).count();
    let rank = eigenvalues.iter().filter(|&&l| l.abs() > tau).count();
    Ok(SpectralSummary { eigenvalues, n_pos, n_neg, rank, tolerance: tau })
}

/// Deterministic generator used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed number `counter` of `master` (splitmix64 finalizer).
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(counter.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary_from_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_gaussian(d, d, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    ComplexMatrix(q)
}

pub fn haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    haar_unitary_from_rng(d, &mut seeded_rng(seed))
}

/// Uniform point on the unit sphere in `R^n`.
pub fn unit_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Number of real coordinates of an `n × n` Hermitian matrix.
pub fn hermitian_coordinate_len(n: usize) -> usize {
    n * n
}

/// Real coordinates in which the Euclidean inner product equals `tr(AB)`:
/// the diagonal, then `√2·Re` and `√2·Im` of each strictly upper entry.
pub fn hermitian_coordinates(h: &HermitianMatrix) -> Vec<f64> {
    let n = h.dim();
    let m = h.as_dmatrix();
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    out.extend((0..n).map(|i| m[(i, i)].re));
    for i in 0..n {
        for j in i + 1..n {
            out.push(s * m[(i, j)].re);
            out.push(s * m[(i, j)].im);
        }
    }
    out
}

pub fn from_hermitian_coordinates(n: usize, coords: &[f64]) -> Result<HermitianMatrix> {
    if coords.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for a {n}x{n} Hermitian matrix",
            coords.len()
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(coords[i], 0.0);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(coords[k] * s, coords[k + 1] * s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    Ok(HermitianMatrix(ComplexMatrix::from_dmatrix(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> HermitianMatrix {
        let n = v.len();
        let rows: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { v[i] } else { 0.0 }).collect()).collect();
        HermitianMatrix::from_real_rows(&rows).unwrap()
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap()
    }

    fn toeplitz9() -> ComplexMatrix {
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|i: i32| (0..9).map(|j: i32| (9 - (i - j).abs()) as f64).collect())
            .collect();
        ComplexMatrix::from_real_rows(&rows).unwrap()
    }

    #[test]
    fn hs_inner_examples() {
        let id = HermitianMatrix::identity(3);
        assert_eq!(hs_inner(&id, &id).unwrap(), 3.0);

        let xz = HermitianMatrix::new(pauli_x().kron(&pauli_z())).unwrap();
        assert_eq!(hs_inner(&xz, &diag(&[1.0, -1.0, -1.0, 1.0])).unwrap(), 0.0);

        let b2 = HermitianMatrix::from_real_rows(&[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 2.0, 0.0, -1.0],
            vec![0.0, 0.0, -1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(hs_inner(&b2, &b2).unwrap(), 12.0);
        assert!(hs_inner(&b2, &id).is_err());
    }

    #[test]
    fn partial_traces_of_toeplitz_block_matrix() {
        let dims = BipartiteDims::square(3).unwrap();
        let t = toeplitz9();
        let px = partial_trace_x(&t, dims).unwrap();
        let py = partial_trace_y(&t, dims).unwrap();
        let want_x = [[27.0, 18.0, 9.0], [18.0, 27.0, 18.0], [9.0, 18.0, 27.0]];
        let want_y = [[27.0, 24.0, 21.0], [24.0, 27.0, 24.0], [21.0, 24.0, 27.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(px.get(i, j), C64::new(want_x[i][j], 0.0));
                assert_eq!(py.get(i, j), C64::new(want_y[i][j], 0.0));
            }
        }
    }

    #[test]
    fn partial_traces_of_identity() {
        for d in 1..5 {
            let dims = BipartiteDims::square(d).unwrap();
            let id = ComplexMatrix::identity(d * d);
            let want = ComplexMatrix::identity(d).scale(C64::new(d as f64, 0.0));
            assert_eq!(partial_trace_x(&id, dims).unwrap(), want);
            assert_eq!(partial_trace_y(&id, dims).unwrap(), want);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_size() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        assert!(partial_trace_x(&ComplexMatrix::identity(5), dims).is_err());
        assert!(partial_trace_y(&ComplexMatrix::zeros(6, 5), dims).is_err());
        assert!(BipartiteDims::new(0, 2).is_err());
    }

    #[test]
    fn rectangular_partial_traces_follow_block_layout() {
        // Y is 2-dimensional, X is 3-dimensional: I_Y ⊗ M has tr_Y = 2M.
        let dims = BipartiteDims::new(2, 3).unwrap();
        let m = ComplexMatrix::from_real_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ])
        .unwrap();
        let h = ComplexMatrix::identity(2).kron(&m);
        assert_eq!(partial_trace_y(&h, dims).unwrap(), m.scale(C64::new(2.0, 0.0)));
        let px = partial_trace_x(&h, dims).unwrap();
        assert_eq!(px, ComplexMatrix::identity(2).scale(C64::new(15.0, 0.0)));
    }

    #[test]
    fn hermitian_construction_symmetrizes_and_rejects() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 1.0);
        m[(1, 0)] = C64::new(1.0, -1.0 + 1e-14);
        let h = HermitianMatrix::new(ComplexMatrix::from_dmatrix(m.clone()).unwrap()).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        m[(1, 0)] = C64::new(1.0, 1.0);
        assert!(matches!(
            HermitianMatrix::new(ComplexMatrix::from_dmatrix(m).unwrap()),
            Err(Error::NotHermitian { .. })
        ));
        let mut bad = DMatrix::<C64>::zeros(1, 1);
        bad[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(ComplexMatrix::from_dmatrix(bad).is_err());
    }

    #[test]
    fn spectral_summary_examples() {
        let s = spectral_summary(&diag(&[1.0, -1.0, -1.0, 1.0]), 1e-8).unwrap();
        assert_eq!((s.n_pos, s.n_neg, s.rank), (2, 2, 4));
        assert_eq!(s.eigenvalues, vec![-1.0, -1.0, 1.0, 1.0]);
        let z = spectral_summary(&HermitianMatrix::zeros(3), 1e-8).unwrap();
        assert_eq!((z.n_pos, z.n_neg, z.rank), (0, 0, 0));
        assert!(spectral_summary(&HermitianMatrix::zeros(3), 0.0).is_err());
    }

    #[test]
    fn haar_unitary_contract() {
        for d in 1..6 {
            let u = haar_unitary(d, 11 + d as u64);
            let gram = u.adjoint().mul(&u).unwrap();
            assert!(gram.max_diff(&ComplexMatrix::identity(d)).unwrap() < 1e-12);
            assert_eq!(u, haar_unitary(d, 11 + d as u64));
        }
        let u1 = haar_unitary(1, 5);
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-12);
        assert_ne!(haar_unitary(3, 1), haar_unitary(3, 2));
    }

    #[test]
    fn hermitian_coordinates_are_isometric() {
        let mut rng = seeded_rng(3);
        let a = HermitianMatrix::symmetrize(ComplexMatrix(complex_gaussian(4, 4, &mut rng)));
        let b = HermitianMatrix::symmetrize(ComplexMatrix(complex_gaussian(4, 4, &mut rng)));
        let (ca, cb) = (hermitian_coordinates(&a), hermitian_coordinates(&b));
        let dot: f64 = ca.iter().zip(&cb).map(|(x, y)| x * y).sum();
        assert!((dot - hs_inner(&a, &b).unwrap()).abs() < 1e-12);
        let back = from_hermitian_coordinates(4, &ca).unwrap();
        assert!(back.max_diff(&a).unwrap() < 1e-15);
    }

    #[test]
    fn swap_factors_moves_partial_traces() {
        let dims = BipartiteDims::square(2).unwrap();
        let h = HermitianMatrix::new(pauli_x().kron(&ComplexMatrix::identity(2))).unwrap();
        let s = h.swap_factors(dims).unwrap();
        let want = HermitianMatrix::new(ComplexMatrix::identity(2).kron(&pauli_x())).unwrap();
        assert_eq!(s, want);
    }
}
