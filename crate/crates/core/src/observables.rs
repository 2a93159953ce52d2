//! Interactive observables: complements of discriminating subspaces inside
//! the ambient differences space, and their realization as a maximally
//! entangled input plus a two-outcome POVM.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{max_entangled_state, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{
    from_hermitian_coordinates, hermitian_coordinates, hs_inner, partial_trace_x, partial_trace_y, BipartiteDims,
    ComplexMatrix, HermitianMatrix, C64, I, ONE, ZERO,
};
use crate::subspaces::{self, BuildOptions, Kind, SubspaceBasis, SubspaceKind};

/// Membership tolerance for the ambient spaces.
pub const AMBIENT_TOL: f64 = 1e-10;
/// Relative drop tolerance in Gram–Schmidt.
pub const DROP_TOL: f64 = 1e-10;
/// Eigenvalues within this of zero belong to neither `H₊` nor `H₋`.
pub const SPECTRAL_CLIP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmbientKind {
    #[serde(rename = "Q_all")]
    All,
    #[serde(rename = "Q_unital")]
    Unital,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpace {
    pub kind: AmbientKind,
    pub d: usize,
}

impl AmbientSpace {
    pub fn new(kind: AmbientKind, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument("d must be at least 1".into()));
        }
        Ok(Self { kind, d })
    }

    pub fn dim(&self) -> usize {
        let d2 = self.d * self.d;
        match self.kind {
            AmbientKind::All => d2 * d2 - d2,
            AmbientKind::Unital => d2 * d2 - 2 * d2 + 1,
        }
    }

    /// Largest entry of the partial traces that must vanish.
    pub fn deviation(&self, h: &HermitianMatrix) -> Result<f64> {
        let dims = BipartiteDims::square(self.d)?;
        let mut dev = partial_trace_y(h.as_complex(), dims)?.max_abs();
        if self.kind == AmbientKind::Unital {
            dev = dev.max(partial_trace_x(h.as_complex(), dims)?.max_abs());
        }
        Ok(dev)
    }

    pub fn contains(&self, h: &HermitianMatrix) -> Result<bool> {
        Ok(self.deviation(h)? <= AMBIENT_TOL)
    }

    /// Spanning set of the orthogonal complement of the space in all
    /// Hermitian matrices: `I_Y ⊗ M`, plus `N ⊗ I_X` in the unital case.
    pub fn complement_generators(&self) -> Vec<HermitianMatrix> {
        let d = self.d;
        let id = HermitianMatrix::identity(d);
        let local = hermitian_unit_basis(d);
        let mut out: Vec<HermitianMatrix> = local.iter().map(|m| id.kron(m)).collect();
        if self.kind == AmbientKind::Unital {
            out.extend(local.iter().map(|n| n.kron(&id)));
        }
        out
    }
}

/// Orthonormal basis `E_ii`, `(E_ij + E_ji)/√2`, `i(E_ij − E_ji)/√2`.
fn hermitian_unit_basis(d: usize) -> Vec<HermitianMatrix> {
    (0..d * d)
        .map(|k| {
            let mut e = vec![0.0; d * d];
            e[k] = 1.0;
            from_hermitian_coordinates(d, &e).expect("coordinate length")
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalizes `v` against `basis` (two passes); returns the residual norm.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let p = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
    }
    norm(v)
}

/// Orthonormal basis of `span(V)^⊥ ∩ Q`, completed from standard coordinate
/// vectors in order of largest residual.
pub fn ambient_complement_basis(v: &[HermitianMatrix], q: AmbientSpace) -> Result<Vec<HermitianMatrix>> {
    let n = q.d * q.d;
    for (k, h) in v.iter().enumerate() {
        if h.dim() != n {
            return Err(Error::DimensionMismatch(format!("element {k} is {}x{}, expected {n}x{n}", h.dim(), h.dim())));
        }
        let dev = q.deviation(h)?;
        if dev > AMBIENT_TOL {
            return Err(Error::NotInAmbient(format!("element {k} has partial-trace deviation {dev:e}")));
        }
    }
    let len = n * n;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(len);
    let gens = q.complement_generators();
    for g in &gens {
        let mut c = hermitian_coordinates(g);
        let scale = norm(&c);
        let r = orthogonalize(&mut c, &basis);
        if r > DROP_TOL * scale {
            c.iter_mut().for_each(|x| *x /= r);
            basis.push(c);
        }
    }
    let outside = basis.len();
    if outside != len - q.dim() {
        return Err(Error::RankDeficient { expected: len - q.dim(), found: outside });
    }
    for h in v {
        let mut c = hermitian_coordinates(h);
        let scale = norm(&c);
        let r = orthogonalize(&mut c, &basis);
        if !(r > DROP_TOL * scale) {
            return Err(Error::RankDeficient { expected: outside + v.len(), found: basis.len() });
        }
        c.iter_mut().for_each(|x| *x /= r);
        basis.push(c);
    }
    let wanted = q.dim() - v.len();
    let mut residual: Vec<f64> = (0..len).map(|k| 1.0 - basis.iter().map(|b| b[k] * b[k]).sum::<f64>()).collect();
    let mut out = Vec::with_capacity(wanted);
    for _ in 0..wanted {
        let (k, _) = residual
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &r)| if r > best.1 { (k, r) } else { best });
        let mut e = vec![0.0; len];
        e[k] = 1.0;
        let r = orthogonalize(&mut e, &basis);
        if !(r > DROP_TOL) {
            return Err(Error::RankDeficient { expected: q.dim(), found: basis.len() - outside });
        }
        e.iter_mut().for_each(|x| *x /= r);
        residual.iter_mut().zip(&e).for_each(|(s, x)| *s -= x * x);
        out.push(from_hermitian_coordinates(n, &e)?);
        basis.push(e);
    }
    Ok(out)
}

/// `(H / c, c)` with `c = d·‖H‖_op`, so the result has operator norm `1/d`.
pub fn scale_to_unit(h: &HermitianMatrix, d: usize) -> Result<(HermitianMatrix, f64)> {
    let nrm = h.op_norm()?;
    if !(nrm > 0.0) {
        return Err(Error::InvalidArgument("cannot scale the zero matrix".into()));
    }
    let c = d as f64 * nrm;
    Ok((h.scale(1.0 / c), c))
}

/// Input state and binary POVM realizing an observable of norm at most `1/d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub xi: HermitianMatrix,
    pub q_plus: HermitianMatrix,
    pub q_minus: HermitianMatrix,
    pub p_plus: HermitianMatrix,
    pub p_minus: HermitianMatrix,
}

/// Positive and negative parts `H = H₊ − H₋`, both PSD.
pub fn split_spectrum(h: &HermitianMatrix) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let plus = h.map_spectrum(|l| if l > SPECTRAL_CLIP { l } else { 0.0 })?;
    let minus = h.map_spectrum(|l| if l < -SPECTRAL_CLIP { -l } else { 0.0 })?;
    Ok((plus, minus))
}

/// `Q± = H± + (I/d − H₊ − H₋)/2`, `P± = d·Q±`, `ξ = |φ⁺⟩⟨φ⁺|`.
pub fn decompose_observable(h: &HermitianMatrix, d: usize) -> Result<Decomposition> {
    if h.dim() != d * d {
        return Err(Error::DimensionMismatch(format!("observable must be {0}x{0}", d * d)));
    }
    let nrm = h.op_norm()?;
    let bound = 1.0 / d as f64;
    if nrm > bound + 1e-12 {
        return Err(Error::NormBound { norm: nrm, bound });
    }
    let (hp, hm) = split_spectrum(h)?;
    let rest = HermitianMatrix::identity(d * d).scale(bound).sub(&hp)?.sub(&hm)?.scale(0.5);
    let q_plus = hp.add(&rest)?;
    let q_minus = hm.add(&rest)?;
    let p_plus = q_plus.scale(d as f64);
    let p_minus = q_minus.scale(d as f64);
    Ok(Decomposition { xi: max_entangled_state(d)?, q_plus, q_minus, p_plus, p_minus })
}

/// `tr(H J)`.
pub fn expectation(h: &HermitianMatrix, j: &ChoiMatrix) -> Result<f64> {
    if h.dim() != j.matrix().dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable is {0}x{0} but the Choi matrix is {1}x{1}",
            h.dim(),
            j.matrix().dim()
        )));
    }
    hs_inner(h, j.matrix())
}

#[derive(Clone, Debug, PartialEq)]
pub struct InteractiveObservable {
    pub h: HermitianMatrix,
    /// `‖H / scale‖_op ≤ 1/d`.
    pub scale: f64,
    /// Decomposition of `H / scale`.
    pub decomposition: Option<Decomposition>,
}

impl InteractiveObservable {
    pub fn new(h: HermitianMatrix, d: usize) -> Result<Self> {
        let (unit, scale) = scale_to_unit(&h, d)?;
        let decomposition = Some(decompose_observable(&unit, d)?);
        Ok(Self { h, scale, decomposition })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Question {
    AmongRankQ,
    AmongAll,
    AmongUnital,
}

impl Question {
    pub const ALL: [Question; 3] = [Question::AmongRankQ, Question::AmongAll, Question::AmongUnital];

    pub fn name(&self) -> &'static str {
        match self {
            Question::AmongRankQ => "among_rank_q",
            Question::AmongAll => "among_all",
            Question::AmongUnital => "among_unital",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Question::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown question '{s}'")))
    }

    /// Subspace kind and ambient space answering this question.
    pub fn plan(&self, q: usize) -> (Kind, AmbientKind) {
        match self {
            Question::AmongRankQ if q == 1 => (Kind::V2Unital, AmbientKind::Unital),
            Question::AmongRankQ => (Kind::V2q, AmbientKind::All),
            Question::AmongAll => (Kind::Vqp, AmbientKind::All),
            Question::AmongUnital => (Kind::VqpUnital, AmbientKind::Unital),
        }
    }
}

impl std::fmt::Display for Question {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSet {
    pub d: usize,
    pub q: usize,
    pub question: Question,
    pub seed: u64,
    pub ambient: AmbientSpace,
    pub subspace: SubspaceKind,
    pub subspace_dim: usize,
    pub observables: Vec<InteractiveObservable>,
}

impl ObservableSet {
    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn hermitians(&self) -> Vec<HermitianMatrix> {
        self.observables.iter().map(|o| o.h.clone()).collect()
    }
}

fn decorate(hs: Vec<HermitianMatrix>, d: usize) -> Result<Vec<InteractiveObservable>> {
    hs.into_par_iter().map(|h| InteractiveObservable::new(h, d)).collect()
}

/// Orients `basis` so its vanishing partial traces contain those of `q`.
pub fn orient(basis: &SubspaceBasis, q: AmbientSpace) -> Result<SubspaceBasis> {
    let (_, ty) = basis.vanishing_traces();
    if ty {
        Ok(basis.clone())
    } else {
        let s = subspaces::swap_xy(basis)?;
        if q.kind == AmbientKind::Unital && !s.vanishing_traces().0 {
            return Err(Error::NotInAmbient(format!("{} cannot be oriented into Q_unital", basis.kind.kind)));
        }
        Ok(s)
    }
}

/// Observables built from an arbitrary subspace basis.
pub fn observable_set_from_basis(basis: &SubspaceBasis, question: Question, ambient: AmbientKind) -> Result<ObservableSet> {
    let d = basis.d();
    let amb = AmbientSpace::new(ambient, d)?;
    let oriented = orient(basis, amb)?;
    let hs = ambient_complement_basis(&oriented.elements, amb)?;
    Ok(ObservableSet {
        d,
        q: basis.kind.q,
        question,
        seed: basis.seed,
        ambient: amb,
        subspace: basis.kind,
        subspace_dim: basis.len(),
        observables: decorate(hs, d)?,
    })
}

/// Builds the subspace answering `question` and returns its complement.
pub fn build_observable_set(d: usize, q: usize, question: Question, seed: u64, opts: BuildOptions) -> Result<ObservableSet> {
    let (kind, ambient) = question.plan(q);
    let basis = subspaces::build(SubspaceKind::new(kind, d, q)?, seed, opts)?;
    observable_set_from_basis(&basis, question, ambient)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn mat2(e: [C64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, e.to_vec()).expect("finite")
}

pub fn pauli_x() -> ComplexMatrix {
    mat2([ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    mat2([ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    mat2([ONE, ZERO, ZERO, -ONE])
}

pub fn hadamard() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat2([c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

pub fn phase_s() -> ComplexMatrix {
    mat2([ONE, ZERO, ZERO, I])
}

/// The six local Clifford observables `O₁ … O₆` (factor order `Y ⊗ X`).
pub fn clifford_operators() -> Result<Vec<HermitianMatrix>> {
    let (x, y, z, h, s) = (pauli_x(), pauli_y(), pauli_z(), hadamard(), phase_s());
    let sd = s.adjoint();
    let w = c(1.0, -1.0);
    let o3a = sd.mul(&h)?.mul(&s)?.scale(w);
    let o6a = s.mul(&h)?.mul(&sd)?.scale(w);
    let pairs = [
        (x.clone(), z.clone()),
        (h.clone(), y.clone()),
        (o3a, s.mul(&x)?),
        (y, z.clone()),
        (z.mul(&h)?.mul(&z)?, x.clone()),
        (o6a, x.mul(&s)?),
    ];
    pairs.iter().map(|(a, b)| HermitianMatrix::new(a.kron(b))).collect()
}

/// `O₁ … O₆` as a decomposed observable set for unitaries among unitaries at `d = 2`.
pub fn clifford_set_d2() -> Result<ObservableSet> {
    let ops = clifford_operators()?;
    Ok(ObservableSet {
        d: 2,
        q: 1,
        question: Question::AmongRankQ,
        seed: 0,
        ambient: AmbientSpace::new(AmbientKind::Unital, 2)?,
        subspace: SubspaceKind::new(Kind::V2Unital, 2, 1)?,
        subspace_dim: 3,
        observables: decorate(ops, 2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_extended, choi_from_kraus, KrausChannel};
    use crate::linalg::{seeded_rng, HERMITIAN_TOL};

    fn eq3() -> Vec<HermitianMatrix> {
        subspaces::build_rank3_unital(2, 0, BuildOptions::default()).unwrap().elements
    }

    /// `tr(P ρ)` computed from raw entries.
    fn tr_prod(p: &HermitianMatrix, rho: &ComplexMatrix) -> C64 {
        let n = p.dim();
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                s += p.get(i, j) * rho.get(j, i);
            }
        }
        s
    }

    #[test]
    fn ambient_dimensions_and_membership() {
        assert_eq!(AmbientSpace::new(AmbientKind::All, 2).unwrap().dim(), 12);
        assert_eq!(AmbientSpace::new(AmbientKind::Unital, 3).unwrap().dim(), 64);
        let q = AmbientSpace::new(AmbientKind::Unital, 2).unwrap();
        assert!(eq3().iter().all(|h| q.contains(h).unwrap()));
        assert!(!q.contains(&HermitianMatrix::identity(4)).unwrap());
        assert_eq!(q.complement_generators().len(), 8);
    }

    #[test]
    fn complement_examples() {
        let qu = AmbientSpace::new(AmbientKind::Unital, 2).unwrap();
        let comp = ambient_complement_basis(&eq3(), qu).unwrap();
        assert_eq!(comp.len(), 6);
        for h in &comp {
            assert!(qu.contains(h).unwrap());
            for v in eq3() {
                assert!(hs_inner(h, &v).unwrap().abs() < 1e-12);
            }
        }
        let qa = AmbientSpace::new(AmbientKind::All, 2).unwrap();
        let full = ambient_complement_basis(&[], qa).unwrap();
        assert_eq!(full.len(), 12);
        for a in 0..12 {
            for b in 0..12 {
                let g = hs_inner(&full[a], &full[b]).unwrap();
                assert!((g - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert!(matches!(
            ambient_complement_basis(&[HermitianMatrix::identity(4)], qa),
            Err(Error::NotInAmbient(_))
        ));
        let dup = vec![eq3()[0].clone(), eq3()[0].clone()];
        assert!(matches!(ambient_complement_basis(&dup, qu), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn scaling() {
        let (u, c) = scale_to_unit(&HermitianMatrix::identity(4), 2).unwrap();
        assert_eq!(c, 2.0);
        assert!((u.op_norm().unwrap() - 0.5).abs() < 1e-15);
        let xz = HermitianMatrix::new(pauli_x().kron(&pauli_z())).unwrap();
        let (u, c) = scale_to_unit(&xz, 2).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
        let (_, c2) = scale_to_unit(&u, 2).unwrap();
        assert!((c2 - 1.0).abs() < 1e-12);
        assert!(scale_to_unit(&HermitianMatrix::zeros(4), 2).is_err());
    }

    #[test]
    fn zero_observable_is_a_fair_coin() {
        let dec = decompose_observable(&HermitianMatrix::zeros(4), 2).unwrap();
        assert!(dec.q_plus.max_diff(&HermitianMatrix::identity(4).scale(0.25)).unwrap() < 1e-15);
        assert!(dec.p_plus.max_diff(&HermitianMatrix::identity(4).scale(0.5)).unwrap() < 1e-15);
        assert!(dec.p_minus.max_diff(&HermitianMatrix::identity(4).scale(0.5)).unwrap() < 1e-15);
    }

    #[test]
    fn pauli_tensor_spectrum() {
        let h = HermitianMatrix::new(pauli_x().kron(&pauli_z())).unwrap().scale(0.5);
        let dec = decompose_observable(&h, 2).unwrap();
        for q in [&dec.q_plus, &dec.q_minus] {
            for l in q.eigenvalues().unwrap() {
                assert!(l.abs() < 1e-12 || (l - 0.5).abs() < 1e-12 || (l - 0.25).abs() < 1e-12, "{l}");
            }
        }
        assert!(decompose_observable(&h.scale(2.0), 2).is_err());
    }

    #[test]
    fn decomposition_matches_choi_expectation() {
        let mut rng = seeded_rng(4);
        for d in 2..=3 {
            let n = d * d;
            for t in 0..50 {
                let coords: Vec<f64> = (0..n * n).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
                let h = from_hermitian_coordinates(n, &coords).unwrap();
                let (unit, c) = scale_to_unit(&h, d).unwrap();
                let dec = decompose_observable(&unit, d).unwrap();
                let ch = if t % 2 == 0 {
                    KrausChannel::random(d, 1, &mut rng).unwrap()
                } else {
                    KrausChannel::random(d, 2, &mut rng).unwrap()
                };
                let j = choi_from_kraus(&ch).unwrap();
                let rho = apply_extended(&ch, dec.xi.as_complex()).unwrap();
                let lhs = expectation(&h, &j).unwrap();
                let rhs = c * (tr_prod(&dec.p_plus, &rho) - tr_prod(&dec.p_minus, &rho));
                assert!((lhs - rhs.re).abs() < 1e-10 && rhs.im.abs() < 1e-10, "{lhs} vs {rhs}");
                let sum = dec.p_plus.add(&dec.p_minus).unwrap();
                assert!(sum.max_diff(&HermitianMatrix::identity(n)).unwrap() < 1e-12);
                assert!(dec.p_plus.eigenvalues().unwrap()[0] >= -1e-10);
                assert!(dec.p_minus.eigenvalues().unwrap()[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn transposed_povm_disagrees_for_complex_observables() {
        let mut rng = seeded_rng(8);
        let h = clifford_operators().unwrap()[1].clone();
        let (unit, c) = scale_to_unit(&h, 2).unwrap();
        let dec = decompose_observable(&unit, 2).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let ch = KrausChannel::random(2, 1, &mut rng).unwrap();
            let j = choi_from_kraus(&ch).unwrap();
            let rho = apply_extended(&ch, dec.xi.as_complex()).unwrap();
            let t = c * (tr_prod(&dec.p_plus.transpose(), &rho) - tr_prod(&dec.p_minus.transpose(), &rho)).re;
            worst = worst.max((t - expectation(&h, &j).unwrap()).abs());
        }
        assert!(worst > 1e-3, "{worst}");
    }

    #[test]
    fn expectation_examples() {
        let j = choi_from_kraus(&KrausChannel::identity(2).unwrap()).unwrap();
        let h = HermitianMatrix::identity(4).scale(0.25);
        assert!((expectation(&h, &j).unwrap() - 0.5).abs() < 1e-15);
        assert!(expectation(&HermitianMatrix::identity(9), &j).is_err());
    }

    #[test]
    fn clifford_set_properties() {
        let ops = clifford_operators().unwrap();
        let dims = BipartiteDims::square(2).unwrap();
        for o in &ops {
            assert!(o.as_complex().max_diff(&o.as_complex().adjoint()).unwrap() <= HERMITIAN_TOL);
            assert!(partial_trace_x(o.as_complex(), dims).unwrap().max_abs() < 1e-15);
            assert!(partial_trace_y(o.as_complex(), dims).unwrap().max_abs() < 1e-15);
            for v in eq3() {
                assert!(hs_inner(o, &v).unwrap().abs() < 1e-12);
            }
        }
        assert_eq!(hs_inner(&ops[0], &eq3()[0]).unwrap(), 0.0);
        let (smin, smax) = subspaces::gram_extremes(&ops);
        assert!(smin > 1e-9 * smax);
        let set = clifford_set_d2().unwrap();
        assert_eq!(set.len(), 6);
    }

    #[test]
    fn observable_counts_small() {
        let opts = BuildOptions::default();
        assert_eq!(build_observable_set(2, 1, Question::AmongRankQ, 7, opts).unwrap().len(), 6);
        assert_eq!(build_observable_set(3, 1, Question::AmongAll, 7, opts).unwrap().len(), 32);
        assert_eq!(build_observable_set(3, 1, Question::AmongUnital, 7, opts).unwrap().len(), 28);
        assert_eq!(build_observable_set(3, 1, Question::AmongRankQ, 7, opts).unwrap().len(), 26);
        let s = build_observable_set(3, 2, Question::AmongRankQ, 7, opts).unwrap();
        assert_eq!(s.subspace.kind, Kind::V2q);
        assert_eq!(s.len(), 72 - subspaces::dim_formula(s.subspace).unwrap());
    }

    #[test]
    fn question_names() {
        for q in Question::ALL {
            assert_eq!(Question::parse(q.name()).unwrap(), q);
        }
        assert!(Question::parse("among_none").is_err());
    }
}
