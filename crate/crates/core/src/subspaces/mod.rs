//! Discriminating subspaces of Hermitian matrices on `Y ⊗ X` with
//! vanishing partial traces, plus their verification.
//!
//! * [`Kind::V2q`]: every nonzero element has rank at least `2q + 1`; `tr_X = 0`.
//! * [`Kind::V2Unital`]: rank at least 3; both partial traces vanish.
//! * [`Kind::Vqp`]: at least `q + 1` positive and `q + 1` negative eigenvalues; `tr_Y = 0`.
//! * [`Kind::VqpUnital`]: as `Vqp` with both partial traces vanishing.

pub mod antidiagonal;
pub mod diagonal;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    derive_seed, hermitian_coordinates, partial_trace_x, partial_trace_y, seeded_rng, spectral_summary, unit_sphere,
    BipartiteDims, HermitianMatrix, C64, I, ONE,
};
use crate::tns::{random_block, verify_column_rank, Certification, RealMatrix, TnsReport, DEFAULT_MAX_ATTEMPTS};

use diagonal::Constraints;

/// Partial traces of basis elements must vanish to this accuracy.
pub const PARTIAL_TRACE_TOL: f64 = 1e-12;
/// Independence threshold on the Gram spectrum.
pub const INDEPENDENCE_RATIO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    V2q,
    #[serde(rename = "V2_unital")]
    V2Unital,
    Vqp,
    #[serde(rename = "Vqp_unital")]
    VqpUnital,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::V2q, Kind::V2Unital, Kind::Vqp, Kind::VqpUnital];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::V2q => "V2q",
            Kind::V2Unital => "V2_unital",
            Kind::Vqp => "Vqp",
            Kind::VqpUnital => "Vqp_unital",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown subspace kind '{s}'")))
    }

    pub fn is_unital(&self) -> bool {
        matches!(self, Kind::V2Unital | Kind::VqpUnital)
    }

    pub fn is_rank_kind(&self) -> bool {
        matches!(self, Kind::V2q | Kind::V2Unital)
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceKind {
    pub kind: Kind,
    pub d: usize,
    pub q: usize,
}

impl SubspaceKind {
    /// Validates the parameter range; `dim_formula` must also be positive.
    pub fn new(kind: Kind, d: usize, q: usize) -> Result<Self> {
        let sk = SubspaceKind { kind, d, q };
        sk.check_range()?;
        if formula_raw(sk) <= 0 {
            return Err(Error::OutOfRange(format!("{kind} at d={d}, q={q} has no elements")));
        }
        Ok(sk)
    }

    fn check_range(&self) -> Result<()> {
        let SubspaceKind { kind, d, q } = *self;
        if d < 2 {
            return Err(Error::OutOfRange(format!("d must be at least 2, got {d}")));
        }
        if q < 1 {
            return Err(Error::OutOfRange("q must be at least 1".into()));
        }
        let ok = match kind {
            Kind::V2q => 2 * q < d * d,
            Kind::V2Unital => q == 1,
            Kind::Vqp | Kind::VqpUnital => 2 * q + 2 <= d * d,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("q={q} is outside the valid range of {kind} at d={d}")))
        }
    }

    /// Required minimum rank (rank kinds) or eigenvalue count per sign.
    pub fn demand(&self) -> usize {
        match self.kind {
            Kind::V2q => 2 * self.q + 1,
            Kind::V2Unital => 3,
            Kind::Vqp | Kind::VqpUnital => self.q + 1,
        }
    }
}

/// Length of the `k`-th strictly upper anti-diagonal of a `d × d` grid.
pub fn anti_diag_length(d: usize, k: usize) -> Result<usize> {
    if d < 2 || k < 1 || k > 2 * d - 3 {
        return Err(Error::OutOfRange(format!("anti-diagonal {k} of a {d}x{d} grid")));
    }
    Ok(if k < d { k.div_ceil(2) } else { (2 * d - k - 1) / 2 })
}

/// `{k ∈ 1..2d−3 : L_{d²,dk} ≥ q+1}`.
pub fn index_set_iq(d: usize, q: usize) -> Vec<usize> {
    if d < 2 {
        return Vec::new();
    }
    (1..=2 * d - 3).filter(|&k| anti_diag_length(d * d, d * k).is_ok_and(|l| l > q)).collect()
}

fn formula_raw(sk: SubspaceKind) -> i64 {
    let (d, q) = (sk.d as i64, sk.q as i64);
    let vqp = |d: i64, q: i64| d.pow(4) - (4 * q + 1) * d * d + 4 * q * q + 2 * q - (d - q - 1) * (d - q).max(0);
    match sk.kind {
        Kind::V2q => {
            let shift = if d % 2 == 1 { 2 * q + d - 1 } else { 2 * q + d - 2 };
            (d * d - 2 * q).pow(2) - (d - shift / d).pow(2)
        }
        Kind::V2Unital => {
            if d == 2 {
                3
            } else {
                d.pow(4) - 6 * d * d + 2 * d + 5
            }
        }
        Kind::Vqp => vqp(d, q),
        Kind::VqpUnital => {
            let iq = index_set_iq(sk.d, sk.q);
            let lost: i64 = iq.iter().map(|&k| anti_diag_length(sk.d, k).unwrap() as i64).sum();
            // The first anti-diagonal corner, (0, d), lies on an anti-diagonal
            // already emptied by the tr_Y correction; it only counts when that
            // anti-diagonal is long enough to carry elements.
            let add_back = if iq.contains(&1) { 2 } else { 0 };
            vqp(d, q) - 2 * lost + add_back
        }
    }
}

/// Dimension of the constructed subspace.
pub fn dim_formula(sk: SubspaceKind) -> Result<usize> {
    sk.check_range()?;
    let v = formula_raw(sk);
    if v <= 0 {
        return Err(Error::OutOfRange(format!("{} at d={}, q={} has no elements", sk.kind, sk.d, sk.q)));
    }
    Ok(v as usize)
}

/// How column data was certified across all diagonals of a construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertificationSummary {
    pub slots: usize,
    pub exhaustive_slots: usize,
    pub submatrices_checked: u64,
    pub min_singular_ratio: f64,
    pub regenerations: usize,
}

impl CertificationSummary {
    fn record(&mut self, rep: &TnsReport) {
        self.slots += 1;
        self.exhaustive_slots += rep.exhaustive as usize;
        self.submatrices_checked += rep.submatrices_checked;
        self.regenerations += rep.attempts - 1;
        if self.slots == 1 || rep.min_singular_value_seen < self.min_singular_ratio {
            self.min_singular_ratio = rep.min_singular_value_seen;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub kind: SubspaceKind,
    pub elements: Vec<HermitianMatrix>,
    pub claimed_dim: usize,
    pub seed: u64,
    /// Whether `swap_xy` has been applied relative to the construction.
    pub swapped: bool,
    pub certification: CertificationSummary,
}

impl SubspaceBasis {
    pub fn d(&self) -> usize {
        self.kind.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Which partial traces vanish: `(tr_X, tr_Y)`.
    pub fn vanishing_traces(&self) -> (bool, bool) {
        let native = match self.kind.kind {
            Kind::V2q => (true, false),
            Kind::Vqp => (false, true),
            Kind::V2Unital | Kind::VqpUnital => (true, true),
        };
        if self.swapped {
            (native.1, native.0)
        } else {
            native
        }
    }
}

/// Exchanges the roles of `X` and `Y` in every element.
pub fn swap_xy(basis: &SubspaceBasis) -> Result<SubspaceBasis> {
    let dims = BipartiteDims::square(basis.d())?;
    let elements = basis.elements.iter().map(|h| h.swap_factors(dims)).collect::<Result<Vec<_>>>()?;
    Ok(SubspaceBasis { elements, swapped: !basis.swapped, ..basis.clone() })
}

/// Budget used when certifying each diagonal's column data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub cert: Certification,
    pub max_attempts: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { cert: Certification { exhaustive_budget: 20_000, sample_count: 2_000 }, max_attempts: DEFAULT_MAX_ATTEMPTS }
    }
}

/// Draws column data until the surviving rows pass the column-rank test.
fn certified<F>(seed: u64, slot_index: usize, opts: BuildOptions, what: &str, mut draw: F) -> Result<(RealMatrix, TnsReport)>
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng) -> (RealMatrix, RealMatrix, usize),
{
    let slot_seed = derive_seed(seed, slot_index as u64);
    for attempt in 0..opts.max_attempts.max(1) {
        let mut rng = seeded_rng(derive_seed(slot_seed, attempt as u64));
        let (cols, restricted, r) = draw(&mut rng);
        let mut rep = verify_column_rank(&restricted, r, opts.cert, derive_seed(slot_seed, u64::MAX - attempt as u64));
        if rep.pass() {
            rep.attempts = attempt + 1;
            return Ok((cols, rep));
        }
    }
    Err(Error::CertificationFailed { what: what.to_string(), attempts: opts.max_attempts })
}

fn diagonal_basis(sk: SubspaceKind, seed: u64, opts: BuildOptions, c: Constraints) -> Result<(Vec<HermitianMatrix>, CertificationSummary)> {
    let d = sk.d;
    let n = d * d;
    let slots = diagonal::plan(n, d, c, sk.demand());
    let mut summary = CertificationSummary::default();
    let mut columns = Vec::with_capacity(slots.len());
    for (idx, slot) in slots.iter().enumerate() {
        let what = format!("{} column data on diagonal {}", sk.kind, slot.offset);
        let (cols, rep) = certified(seed, idx, opts, &what, |rng| {
            let cols = diagonal::generate_columns(slot, d, rng);
            (cols.clone(), cols, slot.rows_required)
        })?;
        summary.record(&rep);
        columns.push((slot.offset, cols));
    }
    Ok((diagonal::assemble(n, &columns), summary))
}

/// Column data of the three-element basis at `d = 2` (main diagonal, then
/// the first off-diagonal in position order).
pub fn d2_unital_columns() -> Vec<(usize, RealMatrix)> {
    vec![
        (0, RealMatrix::from_column_slice(4, 1, &[1.0, -1.0, -1.0, 1.0])),
        (1, RealMatrix::from_column_slice(3, 1, &[1.0, 2.0, -1.0])),
    ]
}

/// Basis of `V2q`: rank at least `2q + 1`, `tr_X = 0`.
pub fn build_high_rank(d: usize, q: usize, seed: u64, opts: BuildOptions) -> Result<SubspaceBasis> {
    let sk = SubspaceKind::new(Kind::V2q, d, q)?;
    let (elements, certification) = diagonal_basis(sk, seed, opts, Constraints { tr_x: true, tr_y: false })?;
    finish(sk, elements, seed, certification)
}

/// Basis of `V2_unital`: rank at least 3, both partial traces zero.
pub fn build_rank3_unital(d: usize, seed: u64, opts: BuildOptions) -> Result<SubspaceBasis> {
    let sk = SubspaceKind::new(Kind::V2Unital, d, 1)?;
    let (elements, certification) = if d == 2 {
        (diagonal::assemble(4, &d2_unital_columns()), CertificationSummary::default())
    } else {
        diagonal_basis(sk, seed, opts, Constraints { tr_x: true, tr_y: true })?
    };
    finish(sk, elements, seed, certification)
}

fn anti_basis(sk: SubspaceKind, seed: u64, opts: BuildOptions) -> Result<(Vec<HermitianMatrix>, CertificationSummary)> {
    let d = sk.d;
    let unital = sk.kind == Kind::VqpUnital;
    let slots = antidiagonal::plan(d, sk.q, unital);
    let mut summary = CertificationSummary::default();
    let mut real = Vec::new();
    for (idx, slot) in slots.iter().enumerate() {
        let what = format!("{} column data on anti-diagonal {}", sk.kind, slot.sum);
        let (cols, rep) = certified(seed, idx, opts, &what, |rng| {
            let cols = random_block(slot.entries.len(), slot.count, rng);
            let restricted = RealMatrix::from_fn(slot.surviving.len(), slot.count, |r, c| cols[(slot.surviving[r], c)]);
            (cols, restricted, slot.count)
        })?;
        summary.record(&rep);
        real.push((slot, cols));
    }
    let mut elements = Vec::new();
    for (slot, cols) in &real {
        for phase in [ONE, I] {
            for j in 0..cols.ncols() {
                let values: Vec<C64> = cols.column(j).iter().map(|&x| phase * x).collect();
                elements.push(antidiagonal::element(d, &slot.entries, &values, unital));
            }
        }
    }
    Ok((elements, summary))
}

/// Basis of `Vqp`: at least `q + 1` eigenvalues of each sign, `tr_Y = 0`.
pub fn build_pos_eig(d: usize, q: usize, seed: u64, opts: BuildOptions) -> Result<SubspaceBasis> {
    let sk = SubspaceKind::new(Kind::Vqp, d, q)?;
    let (elements, certification) = anti_basis(sk, seed, opts)?;
    finish(sk, elements, seed, certification)
}

/// Basis of `Vqp_unital`: as [`build_pos_eig`] with both partial traces zero.
pub fn build_pos_eig_unital(d: usize, q: usize, seed: u64, opts: BuildOptions) -> Result<SubspaceBasis> {
    let sk = SubspaceKind::new(Kind::VqpUnital, d, q)?;
    let (elements, certification) = anti_basis(sk, seed, opts)?;
    finish(sk, elements, seed, certification)
}

/// Dispatches on the kind.
pub fn build(sk: SubspaceKind, seed: u64, opts: BuildOptions) -> Result<SubspaceBasis> {
    match sk.kind {
        Kind::V2q => build_high_rank(sk.d, sk.q, seed, opts),
        Kind::V2Unital => {
            SubspaceKind::new(Kind::V2Unital, sk.d, sk.q)?;
            build_rank3_unital(sk.d, seed, opts)
        }
        Kind::Vqp => build_pos_eig(sk.d, sk.q, seed, opts),
        Kind::VqpUnital => build_pos_eig_unital(sk.d, sk.q, seed, opts),
    }
}

fn finish(kind: SubspaceKind, elements: Vec<HermitianMatrix>, seed: u64, certification: CertificationSummary) -> Result<SubspaceBasis> {
    let claimed_dim = dim_formula(kind)?;
    if elements.len() != claimed_dim {
        return Err(Error::RankDeficient { expected: claimed_dim, found: elements.len() });
    }
    Ok(SubspaceBasis { kind, elements, claimed_dim, seed, swapped: false, certification })
}

/// One sampled combination that missed the kind's demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialViolation {
    pub trial: usize,
    pub rank: usize,
    pub n_pos: usize,
    pub n_neg: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspacePropertyReport {
    pub trials: usize,
    pub min_rank_seen: usize,
    pub min_pos_eigs_seen: usize,
    pub min_neg_eigs_seen: usize,
    /// Smallest and largest eigenvalue of the Gram matrix of the elements.
    pub independence_sigma_min: f64,
    pub independence_sigma_max: f64,
    pub partial_trace_deviation: f64,
    pub cardinality_ok: bool,
    pub violations: Vec<TrialViolation>,
    pub pass: bool,
}

/// Gram spectrum `(σ_min, σ_max)` in the trace inner product.
pub fn gram_extremes(elements: &[HermitianMatrix]) -> (f64, f64) {
    if elements.is_empty() {
        return (0.0, 0.0);
    }
    let coords: Vec<Vec<f64>> = elements.iter().map(hermitian_coordinates).collect();
    let m = coords.len();
    let dim = coords[0].len();
    let a = RealMatrix::from_fn(dim, m, |r, c| coords[c][r]);
    let gram = a.transpose() * &a;
    let ev = gram.symmetric_eigenvalues();
    let mn = ev.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let mx = ev.iter().cloned().fold(0.0, f64::max);
    (mn, mx)
}

/// Largest partial-trace entry that should vanish, over all elements.
pub fn partial_trace_deviation(basis: &SubspaceBasis) -> Result<f64> {
    let dims = BipartiteDims::square(basis.d())?;
    let (tx, ty) = basis.vanishing_traces();
    let mut dev: f64 = 0.0;
    for h in &basis.elements {
        if tx {
            dev = dev.max(partial_trace_x(h.as_complex(), dims)?.max_abs());
        }
        if ty {
            dev = dev.max(partial_trace_y(h.as_complex(), dims)?.max_abs());
        }
    }
    Ok(dev)
}

/// Checks partial traces, independence, cardinality and `trials` random
/// unit-sphere combinations against the kind's rank or inertia demand.
pub fn verify_subspace(basis: &SubspaceBasis, trials: usize, seed: u64) -> Result<SubspacePropertyReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = basis.d() * basis.d();
    if basis.elements.iter().any(|h| h.dim() != n) {
        return Err(Error::DimensionMismatch(format!("basis elements must be {n}x{n}")));
    }
    let deviation = partial_trace_deviation(basis)?;
    let (smin, smax) = gram_extremes(&basis.elements);
    let independent = smax > 0.0 && smin > INDEPENDENCE_RATIO * smax;
    let cardinality_ok = basis.elements.len() == basis.claimed_dim;
    let demand = basis.kind.demand();
    let rank_kind = basis.kind.kind.is_rank_kind();

    let outcomes: Vec<Result<(usize, usize, usize)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            if basis.elements.is_empty() {
                return Ok((0, 0, 0));
            }
            let mut rng = seeded_rng(derive_seed(seed, t as u64));
            let x = unit_sphere(basis.elements.len(), &mut rng);
            let h = HermitianMatrix::combination(&x, &basis.elements)?;
            let tau = 1e-8 * h.op_norm()?.max(1.0);
            let s = spectral_summary(&h, tau)?;
            Ok((s.rank, s.n_pos, s.n_neg))
        })
        .collect();

    let mut report = SubspacePropertyReport {
        trials,
        min_rank_seen: usize::MAX,
        min_pos_eigs_seen: usize::MAX,
        min_neg_eigs_seen: usize::MAX,
        independence_sigma_min: smin,
        independence_sigma_max: smax,
        partial_trace_deviation: deviation,
        cardinality_ok,
        violations: Vec::new(),
        pass: false,
    };
    for (t, o) in outcomes.into_iter().enumerate() {
        let (rank, n_pos, n_neg) = o?;
        report.min_rank_seen = report.min_rank_seen.min(rank);
        report.min_pos_eigs_seen = report.min_pos_eigs_seen.min(n_pos);
        report.min_neg_eigs_seen = report.min_neg_eigs_seen.min(n_neg);
        let ok = if rank_kind { rank >= demand } else { n_pos >= demand && n_neg >= demand };
        if !ok {
            report.violations.push(TrialViolation { trial: t, rank, n_pos, n_neg });
        }
    }
    report.pass = report.violations.is_empty() && independent && cardinality_ok && deviation <= PARTIAL_TRACE_TOL;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_inner;

    fn sk(kind: Kind, d: usize, q: usize) -> SubspaceKind {
        SubspaceKind { kind, d, q }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(dim_formula(sk(Kind::V2Unital, 2, 1)).unwrap(), 3);
        assert_eq!(dim_formula(sk(Kind::V2q, 2, 1)).unwrap(), 3);
        assert_eq!(dim_formula(sk(Kind::V2q, 3, 1)).unwrap(), 45);
        assert_eq!(dim_formula(sk(Kind::V2Unital, 3, 1)).unwrap(), 38);
        assert_eq!(dim_formula(sk(Kind::Vqp, 3, 1)).unwrap(), 40);
        assert_eq!(dim_formula(sk(Kind::VqpUnital, 3, 1)).unwrap(), 36);
        assert_eq!(72 - 45, 4 * 9 - 2 * 3 - 3);
        assert!(dim_formula(sk(Kind::V2Unital, 3, 2)).is_err());
        assert!(dim_formula(sk(Kind::V2q, 2, 2)).is_err());
        assert!(dim_formula(sk(Kind::Vqp, 2, 2)).is_err());
        assert!(dim_formula(sk(Kind::Vqp, 1, 1)).is_err());
    }

    #[test]
    fn observable_count_consistency() {
        for d in 3..=8usize {
            let qall = d.pow(4) - d * d;
            let qun = d.pow(4) - 2 * d * d + 1;
            assert_eq!(qun - dim_formula(sk(Kind::V2Unital, d, 1)).unwrap(), 4 * d * d - 2 * d - 4);
            assert_eq!(qall - dim_formula(sk(Kind::Vqp, d, 1)).unwrap(), 5 * d * d - 3 * d - 4);
            assert_eq!(qun - dim_formula(sk(Kind::VqpUnital, d, 1)).unwrap(), 5 * d * d - 4 * d - 5);
        }
        assert_eq!(9 - dim_formula(sk(Kind::V2Unital, 2, 1)).unwrap(), 6);
        assert_eq!(12 - dim_formula(sk(Kind::Vqp, 2, 1)).unwrap(), 5 * 4 - 6 - 4);
        assert_eq!(9 - dim_formula(sk(Kind::VqpUnital, 2, 1)).unwrap(), 5 * 4 - 8 - 5);
    }

    #[test]
    fn anti_diagonal_lengths() {
        assert_eq!((1..=3).map(|k| anti_diag_length(3, k).unwrap()).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert_eq!(anti_diag_length(4, 3).unwrap(), 2);
        assert_eq!(anti_diag_length(9, 3).unwrap(), 2);
        assert!(anti_diag_length(3, 0).is_err());
        assert!(anti_diag_length(3, 4).is_err());
        for d in 2..=7 {
            let n = d * d;
            for k in 1..=2 * d - 3 {
                let counted = antidiagonal::anti_diagonal_entries(d, k).len();
                assert_eq!(anti_diag_length(d, k).unwrap(), counted);
            }
            let total: usize = (1..=2 * d - 3).map(|k| anti_diag_length(d, k).unwrap()).sum();
            assert_eq!(total, d * (d - 1) / 2, "n={n}");
        }
    }

    #[test]
    fn index_sets() {
        assert_eq!(index_set_iq(3, 1), vec![1, 2, 3]);
        let s: usize = index_set_iq(3, 1).iter().map(|&k| anti_diag_length(3, k).unwrap()).sum();
        assert_eq!(2 * s, 6);
        assert!(index_set_iq(3, 8).is_empty());
        for d in 2..=8usize {
            for q in 1..=12usize {
                let s: usize = index_set_iq(d, q).iter().map(|&k| anti_diag_length(d, k).unwrap()).sum();
                if q >= d {
                    assert!(2 * s + 2 <= d * d - d, "d={d} q={q}");
                } else if d >= 3 && q == 1 {
                    assert_eq!(2 * s, d * d - d, "d={d}");
                }
            }
        }
    }

    #[test]
    fn add_back_term_tracks_first_anti_diagonal() {
        // At d = 2 the corner (0, 2) sits on an anti-diagonal too short to
        // carry any element, so nothing is added back even though q < d.
        assert!(index_set_iq(2, 1).is_empty());
        let planned = antidiagonal::element_count(&antidiagonal::plan(2, 1, true));
        assert_eq!(planned, 2);
        assert_eq!(dim_formula(sk(Kind::VqpUnital, 2, 1)).unwrap(), planned);
    }

    #[test]
    fn planned_counts_match_formulas() {
        for d in 2..=8usize {
            for q in 1..=4usize {
                let n = d * d;
                if let Ok(dim) = dim_formula(sk(Kind::V2q, d, q)) {
                    let slots = diagonal::plan(n, d, Constraints { tr_x: true, tr_y: false }, 2 * q + 1);
                    assert_eq!(diagonal::element_count(&slots), dim, "V2q d={d} q={q}");
                }
                for (kind, unital) in [(Kind::Vqp, false), (Kind::VqpUnital, true)] {
                    if let Ok(dim) = dim_formula(sk(kind, d, q)) {
                        assert_eq!(antidiagonal::element_count(&antidiagonal::plan(d, q, unital)), dim, "{kind} d={d} q={q}");
                    }
                }
            }
            let slots = diagonal::plan(n_of(d), d, Constraints { tr_x: true, tr_y: true }, 3);
            assert_eq!(diagonal::element_count(&slots), dim_formula(sk(Kind::V2Unital, d, 1)).unwrap(), "d={d}");
        }
    }

    fn n_of(d: usize) -> usize {
        d * d
    }

    fn d2_printed() -> Vec<HermitianMatrix> {
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        let i = |x: f64| C64::new(0.0, x);
        let m = |e: [[C64; 4]; 4]| {
            HermitianMatrix::new(
                crate::linalg::ComplexMatrix::from_row_major(4, 4, e.iter().flatten().copied().collect()).unwrap(),
            )
            .unwrap()
        };
        vec![
            m([[r(1.), z, z, z], [z, r(-1.), z, z], [z, z, r(-1.), z], [z, z, z, r(1.)]]),
            m([[z, r(1.), z, z], [r(1.), z, r(2.), z], [z, r(2.), z, r(-1.)], [z, z, r(-1.), z]]),
            m([[z, i(1.), z, z], [i(-1.), z, i(2.), z], [z, i(-2.), z, i(-1.)], [z, z, i(1.), z]]),
        ]
    }

    #[test]
    fn d2_unital_basis_is_the_printed_one() {
        let b = build_rank3_unital(2, 0, BuildOptions::default()).unwrap();
        assert_eq!(b.elements, d2_printed());
        let rep = verify_subspace(&b, 1000, 1).unwrap();
        assert!(rep.pass && rep.min_rank_seen >= 3, "{rep:?}");
        assert_eq!(rep.partial_trace_deviation, 0.0);
        for a in 0..3 {
            for c in a + 1..3 {
                assert_eq!(hs_inner(&b.elements[a], &b.elements[c]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn constructions_at_d3() {
        let opts = BuildOptions::default();
        let cases = [
            (build_high_rank(3, 1, 5, opts).unwrap(), 45),
            (build_rank3_unital(3, 5, opts).unwrap(), 38),
            (build_pos_eig(3, 1, 5, opts).unwrap(), 40),
            (build_pos_eig_unital(3, 1, 5, opts).unwrap(), 36),
        ];
        for (b, n) in cases {
            assert_eq!(b.len(), n);
            let rep = verify_subspace(&b, 300, 2).unwrap();
            assert!(rep.pass, "{}: {rep:?}", b.kind.kind);
            assert!(rep.partial_trace_deviation <= PARTIAL_TRACE_TOL);
        }
    }

    #[test]
    fn duplicated_element_fails_independence() {
        let mut b = build_pos_eig(2, 1, 3, BuildOptions::default()).unwrap();
        b.elements[1] = b.elements[0].clone();
        let rep = verify_subspace(&b, 10, 0).unwrap();
        assert!(!rep.pass);
        assert!(rep.independence_sigma_min < 1e-12 * rep.independence_sigma_max.max(1.0));
    }

    #[test]
    fn swap_moves_the_vanishing_trace() {
        let b = build_high_rank(2, 1, 9, BuildOptions::default()).unwrap();
        let dims = BipartiteDims::square(2).unwrap();
        let s = swap_xy(&b).unwrap();
        assert_eq!(s.vanishing_traces(), (false, true));
        for h in &s.elements {
            assert!(partial_trace_y(h.as_complex(), dims).unwrap().max_abs() <= PARTIAL_TRACE_TOL);
        }
        assert_eq!(swap_xy(&s).unwrap().elements, b.elements);
        assert!(verify_subspace(&s, 50, 0).unwrap().pass);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = build_pos_eig_unital(3, 1, 77, BuildOptions::default()).unwrap();
        let b = build_pos_eig_unital(3, 1, 77, BuildOptions::default()).unwrap();
        let c = build_pos_eig_unital(3, 1, 78, BuildOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.elements, c.elements);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in Kind::ALL {
            assert_eq!(Kind::parse(k.name()).unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!(Kind::parse("nope").is_err());
    }
}
