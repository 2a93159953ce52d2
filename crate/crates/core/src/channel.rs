//! Kraus and Choi representations of channels on a `d`-level system.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    complex_gaussian, haar_unitary_from_rng, partial_trace_x, partial_trace_y, BipartiteDims,
    ComplexMatrix, HermitianMatrix, C64, ONE,
};

/// Tolerance for the trace-preserving and unital checks.
pub const CHANNEL_TOL: f64 = 1e-10;

/// Completely positive map `X ↦ Σ Aᵢ X Aᵢ†`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    d: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let d = first.rows();
        if d == 0 {
            return Err(Error::InvalidArgument("zero-dimensional Kraus operator".into()));
        }
        for (k, a) in kraus.iter().enumerate() {
            if a.rows() != d || a.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {d}x{d}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { d, kraus })
    }

    /// The unitary channel `X ↦ U X U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::unitary(ComplexMatrix::identity(d))
    }

    /// `X ↦ tr(X) I/d`, with Kraus operators `|i⟩⟨j|/√d`.
    pub fn completely_depolarizing(d: usize) -> Result<Self> {
        let s = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        let mut ops = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut m = DMatrix::zeros(d, d);
                m[(i, j)] = s;
                ops.push(ComplexMatrix::from_dmatrix_unchecked(m));
            }
        }
        Self::new(ops)
    }

    /// Random channel with `q` Kraus operators cut from a Haar-random isometry.
    pub fn random<R: Rng + ?Sized>(d: usize, q: usize, rng: &mut R) -> Result<Self> {
        if q == 0 || d == 0 {
            return Err(Error::InvalidArgument("random channel needs d, q ≥ 1".into()));
        }
        let qr = complex_gaussian(d * q, d, rng).qr();
        let (mut iso, r) = (qr.q(), qr.r());
        for k in 0..d {
            let rkk = r[(k, k)];
            if rkk.norm() > 0.0 {
                let mut col = iso.column_mut(k);
                col *= rkk / rkk.norm();
            }
        }
        let ops = (0..q)
            .map(|k| ComplexMatrix::from_dmatrix_unchecked(iso.rows(k * d, d).into_owned()))
            .collect();
        Self::new(ops)
    }

    /// Random unital channel: a mixture of `q` Haar unitaries with random weights.
    pub fn random_mixed_unitary<R: Rng + ?Sized>(d: usize, q: usize, rng: &mut R) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("mixture needs q ≥ 1".into()));
        }
        let w: Vec<f64> = (0..q).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let ops = w
            .iter()
            .map(|p| haar_unitary_from_rng(d, rng).scale(C64::new((p / total).sqrt(), 0.0)))
            .collect();
        Self::new(ops)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    /// `max |Σ Aᵢ†Aᵢ − I|`.
    pub fn tp_deviation(&self) -> f64 {
        let mut acc = DMatrix::<C64>::zeros(self.d, self.d);
        for a in &self.kraus {
            acc += a.as_dmatrix().adjoint() * a.as_dmatrix();
        }
        (acc - DMatrix::<C64>::identity(self.d, self.d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.tp_deviation() <= CHANNEL_TOL
    }

    /// `Φ(X)` for a `d × d` input.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d || x.cols() != self.d {
            return Err(Error::DimensionMismatch("channel input".into()));
        }
        let mut acc = DMatrix::<C64>::zeros(self.d, self.d);
        for a in &self.kraus {
            acc += a.as_dmatrix() * x.as_dmatrix() * a.as_dmatrix().adjoint();
        }
        Ok(ComplexMatrix::from_dmatrix_unchecked(acc))
    }
}

/// Which structural properties a Choi matrix is asserted to satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChoiFlags {
    pub psd: bool,
    pub tp: bool,
    pub unital: bool,
}

impl ChoiFlags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.tp {
            v.push("tp");
        }
        if self.unital {
            v.push("unital");
        }
        if self.psd {
            v.push("psd");
        }
        v
    }
}

/// `J(Φ) = Σ Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|` on `Y ⊗ X`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dims: BipartiteDims,
    matrix: HermitianMatrix,
    flags: ChoiFlags,
}

impl ChoiMatrix {
    /// Wraps `matrix` after checking every property named in `flags`.
    pub fn new(d: usize, matrix: HermitianMatrix, flags: ChoiFlags) -> Result<Self> {
        let dims = BipartiteDims::square(d)?;
        if matrix.dim() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of size {} for d = {d}",
                matrix.dim()
            )));
        }
        let choi = Self { dims, matrix, flags: ChoiFlags::default() };
        if flags.tp && !choi.check_tp()? {
            return Err(Error::InvalidArgument("Choi matrix is not trace-preserving".into()));
        }
        if flags.unital && !choi.check_unital()? {
            return Err(Error::InvalidArgument("Choi matrix is not unital".into()));
        }
        if flags.psd && !choi.check_psd()? {
            return Err(Error::InvalidArgument("Choi matrix is not positive semidefinite".into()));
        }
        Ok(Self { flags, ..choi })
    }

    pub fn d(&self) -> usize {
        self.dims.dx
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn flags(&self) -> ChoiFlags {
        self.flags
    }

    pub fn check_tp(&self) -> Result<bool> {
        let py = partial_trace_y(self.matrix.as_complex(), self.dims)?;
        Ok(py.max_diff(&ComplexMatrix::identity(self.d()))? <= CHANNEL_TOL)
    }

    pub fn check_unital(&self) -> Result<bool> {
        let px = partial_trace_x(self.matrix.as_complex(), self.dims)?;
        Ok(px.max_diff(&ComplexMatrix::identity(self.d()))? <= CHANNEL_TOL)
    }

    pub fn check_psd(&self) -> Result<bool> {
        let lo = self.matrix.eigenvalues()?.first().copied().unwrap_or(0.0);
        Ok(lo >= -CHANNEL_TOL * self.matrix.max_abs().max(1.0))
    }
}

/// Choi matrix of a Kraus channel; flags record PSD plus whichever of TP
/// and unital hold numerically.
pub fn choi_from_kraus(ch: &KrausChannel) -> Result<ChoiMatrix> {
    let d = ch.dim();
    let n = d * d;
    let mut j = DMatrix::<C64>::zeros(n, n);
    // J = Σ_k vec(A_k) vec(A_k)†, vec in row-major order (index a·d + i ↔ A[a][i]).
    for a in ch.kraus_ops() {
        let v = DMatrix::from_fn(n, 1, |r, _| a.get(r / d, r % d));
        j += &v * v.adjoint();
    }
    let matrix = HermitianMatrix::symmetrize(ComplexMatrix::from_dmatrix_unchecked(j));
    let mut choi = ChoiMatrix {
        dims: BipartiteDims::square(d)?,
        matrix,
        flags: ChoiFlags { psd: true, ..Default::default() },
    };
    choi.flags.tp = choi.check_tp()?;
    choi.flags.unital = choi.check_unital()?;
    Ok(choi)
}

/// Choi matrix written directly as `Σ Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`; slower than
/// [`choi_from_kraus`], used as an independent cross-check.
pub fn choi_by_definition(ch: &KrausChannel) -> Result<ComplexMatrix> {
    let d = ch.dim();
    let mut j = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            let mut e = DMatrix::zeros(d, d);
            e[(i, k)] = ONE;
            let e = ComplexMatrix::from_dmatrix_unchecked(e);
            j = j.add(&ch.apply(&e)?.kron(&e))?;
        }
    }
    Ok(j)
}

/// `(Φ ⊗ id_Z)(ξ)` for a state on `X ⊗ Z`, with `Z` of any dimension fixed
/// by the state's size.
pub fn apply_extended(ch: &KrausChannel, state: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !state.is_square() {
        return Err(Error::DimensionMismatch("state must be square".into()));
    }
    let d = ch.dim();
    if !state.rows().is_multiple_of(d) {
        return Err(Error::DimensionMismatch(format!(
            "state of size {} does not factor through d = {d}",
            state.rows()
        )));
    }
    let dz = state.rows() / d;
    let id_z = ComplexMatrix::identity(dz);
    let mut acc = ComplexMatrix::zeros(state.rows(), state.rows());
    for a in ch.kraus_ops() {
        let big = a.kron(&id_z);
        acc = acc.add(&big.mul(state)?.mul(&big.adjoint())?)?;
    }
    Ok(acc)
}

/// `|φ⁺⟩⟨φ⁺|` with `|φ⁺⟩ = d^{-1/2} Σ |i⟩_X |i⟩_Z`.
pub fn max_entangled_state(d: usize) -> Result<HermitianMatrix> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let n = d * d;
    let w = C64::new(1.0 / d as f64, 0.0);
    let m = DMatrix::from_fn(n, n, |r, c| if r % (d + 1) == 0 && c % (d + 1) == 0 { w } else { C64::new(0.0, 0.0) });
    Ok(HermitianMatrix::symmetrize(ComplexMatrix::from_dmatrix_unchecked(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, seeded_rng, spectral_summary};

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn identity_channel_choi() {
        let j = choi_from_kraus(&KrausChannel::identity(2).unwrap()).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let one = [0, 3].contains(&r) && [0, 3].contains(&c);
                assert_eq!(j.matrix().get(r, c).re, if one { 1.0 } else { 0.0 });
            }
        }
        let f = j.flags();
        assert!(f.tp && f.unital && f.psd);
    }

    #[test]
    fn depolarizing_choi_is_scaled_identity() {
        for d in 1..4 {
            let j = choi_from_kraus(&KrausChannel::completely_depolarizing(d).unwrap()).unwrap();
            let want = HermitianMatrix::identity(d * d).scale(1.0 / d as f64);
            assert!(j.matrix().max_diff(&want).unwrap() < 1e-15);
        }
    }

    #[test]
    fn unitary_choi_has_rank_one_and_trace_d() {
        for d in 2..5 {
            let ch = KrausChannel::unitary(haar_unitary(d, d as u64)).unwrap();
            let j = choi_from_kraus(&ch).unwrap();
            assert!((j.matrix().trace() - d as f64).abs() < 1e-12);
            let s = spectral_summary(j.matrix(), 1e-8).unwrap();
            assert_eq!(s.rank, 1);
            let direct = choi_by_definition(&ch).unwrap();
            assert!(direct.max_diff(j.matrix().as_complex()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn choi_rejects_empty_and_mismatched_kraus() {
        assert!(KrausChannel::new(vec![]).is_err());
        let bad = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(KrausChannel::new(bad).is_err());
    }

    #[test]
    fn extended_application_examples() {
        let phi = max_entangled_state(2).unwrap();
        let id = KrausChannel::identity(2).unwrap();
        let out = apply_extended(&id, phi.as_complex()).unwrap();
        assert!(out.max_diff(phi.as_complex()).unwrap() < 1e-15);

        let dep = KrausChannel::completely_depolarizing(2).unwrap();
        let out = apply_extended(&dep, phi.as_complex()).unwrap();
        let quarter = ComplexMatrix::identity(4).scale(C64::new(0.25, 0.0));
        assert!(out.max_diff(&quarter).unwrap() < 1e-15);

        let mut rng = seeded_rng(9);
        let ch = KrausChannel::random(3, 2, &mut rng).unwrap();
        let out = apply_extended(&ch, max_entangled_state(3).unwrap().as_complex()).unwrap();
        let j = choi_from_kraus(&ch).unwrap();
        let scaled = out.scale(C64::new(3.0, 0.0));
        assert!(scaled.max_diff(j.matrix().as_complex()).unwrap() < 1e-12);

        assert!(apply_extended(&ch, &ComplexMatrix::zeros(4, 4)).is_err());
        assert!(apply_extended(&ch, &ComplexMatrix::zeros(3, 6)).is_err());
    }

    #[test]
    fn max_entangled_state_examples() {
        let one = max_entangled_state(1).unwrap();
        assert_eq!(one.get(0, 0).re, 1.0);
        let two = max_entangled_state(2).unwrap();
        assert_eq!(two.get(0, 3).re, 0.5);
        assert_eq!(two.get(1, 1).re, 0.0);
        for d in 1..5 {
            let s = max_entangled_state(d).unwrap();
            let dims = BipartiteDims::square(d).unwrap();
            let want = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
            assert!(partial_trace_x(s.as_complex(), dims).unwrap().max_diff(&want).unwrap() < 1e-15);
            assert!(partial_trace_y(s.as_complex(), dims).unwrap().max_diff(&want).unwrap() < 1e-15);
            assert_eq!(spectral_summary(&s, 1e-8).unwrap().rank, 1);
        }
        assert!(max_entangled_state(0).is_err());
    }

    #[test]
    fn random_channels_are_trace_preserving() {
        let mut rng = seeded_rng(1);
        for q in 1..4 {
            let ch = KrausChannel::random(3, q, &mut rng).unwrap();
            assert!(ch.is_trace_preserving());
            assert_eq!(ch.kraus_count(), q);
        }
        let mix = KrausChannel::random_mixed_unitary(3, 2, &mut rng).unwrap();
        assert!(choi_from_kraus(&mix).unwrap().flags().unital);
    }

    #[test]
    fn choi_flag_checks() {
        let j = choi_from_kraus(&KrausChannel::unitary(pauli_x()).unwrap()).unwrap();
        let all = ChoiFlags { psd: true, tp: true, unital: true };
        assert!(ChoiMatrix::new(2, j.matrix().clone(), all).is_ok());
        let doubled = j.matrix().scale(2.0);
        assert!(ChoiMatrix::new(2, doubled.clone(), ChoiFlags { tp: true, ..Default::default() }).is_err());
        let neg = doubled.scale(-1.0);
        assert!(ChoiMatrix::new(2, neg, ChoiFlags { psd: true, ..Default::default() }).is_err());
    }
}
