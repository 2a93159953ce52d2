//! Totally nonsingular matrices and the row-constrained variants whose
//! columns seed every subspace construction.
//!
//! Free entries are drawn uniformly from `[-1, 1]` and rounded to a dyadic
//! grid of spacing `2^-20`, so every derived row (a negated sum of free
//! rows) and every row-group sum is exact in `f64`.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{derive_seed, seeded_rng, unit_sphere};

pub type RealMatrix = DMatrix<f64>;

/// Singular value ratio below which a submatrix counts as rank deficient.
pub const RANK_RATIO: f64 = 1e-9;
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 2_000_000;
pub const DEFAULT_SAMPLES_PER_ROW_COUNT: usize = 10_000;
pub const DEFAULT_MAX_ATTEMPTS: usize = 16;
/// Cap on the number of violations stored in a report.
pub const MAX_RECORDED_VIOLATIONS: usize = 256;

const GRID: f64 = (1u64 << 20) as f64;

/// Which `r × f(r)` submatrices must have full rank `f(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RankProfile {
    /// Every square submatrix nonsingular.
    FullTns,
    /// `f(r) = r − min(⌊r/d⌋, k)`.
    Tr0 { d: usize, k: usize, m: usize },
    /// `f(r) = min(r − ⌊(r−1)/(d−1)⌋, (d−1)²)`.
    BothTr0 { d: usize },
}

impl RankProfile {
    /// Required full-rank column count for `r` rows of a matrix with `cols` columns.
    pub fn f(&self, r: usize, cols: usize) -> usize {
        let raw = match *self {
            RankProfile::FullTns => r,
            RankProfile::Tr0 { d, k, .. } => r - (r / d).min(k),
            RankProfile::BothTr0 { d } => {
                if d < 2 {
                    0
                } else {
                    (r - (r - 1) / (d - 1)).min((d - 1) * (d - 1))
                }
            }
        };
        raw.min(cols)
    }
}

/// Evidence produced by a rank certification sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TnsReport {
    pub exhaustive: bool,
    pub submatrices_checked: u64,
    /// Smallest `σ_min / σ_max` over all checked submatrices.
    pub min_singular_value_seen: f64,
    pub violation_count: u64,
    /// Up to [`MAX_RECORDED_VIOLATIONS`] violating (rows, cols), sorted.
    pub violations: Vec<(Vec<usize>, Vec<usize>)>,
    pub attempts: usize,
}

impl TnsReport {
    pub fn pass(&self) -> bool {
        self.violation_count == 0
    }

    pub(crate) fn merge(&mut self, other: TnsReport) {
        self.exhaustive &= other.exhaustive;
        self.submatrices_checked += other.submatrices_checked;
        self.min_singular_value_seen = self.min_singular_value_seen.min(other.min_singular_value_seen);
        self.violation_count += other.violation_count;
        self.violations.extend(other.violations);
        self.violations.sort();
        self.violations.truncate(MAX_RECORDED_VIOLATIONS);
    }

    fn empty(exhaustive: bool) -> Self {
        TnsReport {
            exhaustive,
            submatrices_checked: 0,
            min_singular_value_seen: f64::INFINITY,
            violation_count: 0,
            violations: Vec::new(),
            attempts: 1,
        }
    }
}

/// Budget for [`verify_rank_profile`] and friends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certification {
    pub exhaustive_budget: u64,
    pub sample_count: usize,
}

impl Default for Certification {
    fn default() -> Self {
        Self { exhaustive_budget: DEFAULT_EXHAUSTIVE_BUDGET, sample_count: DEFAULT_SAMPLES_PER_ROW_COUNT }
    }
}

pub(crate) fn dyadic<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random_range(-1.0..=1.0);
    let v = (u * GRID).round() / GRID;
    if v == 0.0 {
        1.0 / GRID
    } else {
        v
    }
}

/// Vandermonde matrix `V[i][j] = αᵢ^j` for `0 < α₁ < … < α_d`.
pub fn vandermonde(alphas: &[f64]) -> Result<RealMatrix> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no Vandermonde nodes".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidArgument("Vandermonde nodes must be positive".into()));
    }
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("Vandermonde nodes must be strictly increasing".into()));
    }
    let d = alphas.len();
    Ok(DMatrix::from_fn(d, d, |i, j| alphas[i].powi(j as i32)))
}

/// `rows × cols` block of a totally nonsingular-style random matrix.
pub(crate) fn random_block<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> RealMatrix {
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = dyadic(rng);
        }
    }
    m
}

/// Columns of a row-constrained matrix: for each `j < k` the rows
/// `jd … jd+d−1` sum to zero; `extra` unconstrained rows follow.
pub(crate) fn tr0_block<R: Rng + ?Sized>(d: usize, k: usize, extra: usize, cols: usize, rng: &mut R) -> RealMatrix {
    let rows = d * k + extra;
    let mut m = DMatrix::zeros(rows, cols);
    for c in 0..cols {
        for j in 0..k {
            let mut sum = 0.0;
            for i in 0..d - 1 {
                let x = dyadic(rng);
                m[(j * d + i, c)] = x;
                sum += x;
            }
            m[(j * d + d - 1, c)] = -sum;
        }
        for e in 0..extra {
            m[(d * k + e, c)] = dyadic(rng);
        }
    }
    m
}

/// Columns of a `d² × cols` matrix whose consecutive row groups `jd…jd+d−1`
/// and strided row groups `j, j+d, …` all sum to zero.
pub(crate) fn both_tr0_block<R: Rng + ?Sized>(d: usize, cols: usize, rng: &mut R) -> RealMatrix {
    let n = d * d;
    let mut m = DMatrix::zeros(n, cols);
    for c in 0..cols {
        for a in 0..d - 1 {
            for i in 0..d - 1 {
                m[(a * d + i, c)] = dyadic(rng);
            }
        }
        for a in 0..d - 1 {
            let s: f64 = (0..d - 1).map(|i| m[(a * d + i, c)]).sum();
            m[(a * d + d - 1, c)] = -s;
        }
        for i in 0..d - 1 {
            let s: f64 = (0..d - 1).map(|a| m[(a * d + i, c)]).sum();
            m[((d - 1) * d + i, c)] = -s;
        }
        let corner: f64 = (0..d - 1).map(|a| m[(a * d + d - 1, c)]).sum();
        let corner_alt: f64 = (0..d - 1).map(|i| m[((d - 1) * d + i, c)]).sum();
        // Dyadic entries make both derivations exact, hence equal.
        debug_assert_eq!(corner, corner_alt);
        m[((d - 1) * d + d - 1, c)] = -corner;
    }
    m
}

fn permute_rows(m: &RealMatrix, order: &[usize]) -> Result<RealMatrix> {
    let n = m.nrows();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&r| r >= n || std::mem::replace(&mut seen[r], true)) {
        return Err(Error::InvalidArgument(format!("row order is not a permutation of 0..{n}")));
    }
    Ok(DMatrix::from_fn(n, m.ncols(), |r, c| m[(order[r], c)]))
}

/// Square matrix of size `dk + m − 1` with zero consecutive row-group sums,
/// certified against [`RankProfile::Tr0`]. Output row `t` is generator row
/// `row_order[t]` when a permutation is given.
pub fn gen_tr0_tns(
    d: usize,
    k: usize,
    m: usize,
    seed: u64,
    max_attempts: usize,
    row_order: Option<&[usize]>,
    cert: Certification,
) -> Result<(RealMatrix, TnsReport)> {
    if d == 0 || k == 0 || m == 0 {
        return Err(Error::InvalidArgument("d, k, m must all be at least 1".into()));
    }
    let size = d * k + m - 1;
    let profile = RankProfile::Tr0 { d, k, m };
    for attempt in 0..max_attempts.max(1) {
        let mut rng = seeded_rng(derive_seed(seed, attempt as u64));
        let mut v = tr0_block(d, k, m - 1, size, &mut rng);
        if let Some(order) = row_order {
            v = permute_rows(&v, order)?;
        }
        let mut report = verify_rank_profile(&v, profile, cert, derive_seed(seed, 1 << 32 | attempt as u64));
        if report.pass() {
            report.attempts = attempt + 1;
            return Ok((v, report));
        }
    }
    Err(Error::CertificationFailed { what: format!("tr0 matrix (d={d}, k={k}, m={m})"), attempts: max_attempts })
}

/// `d² × d²` matrix with both families of row-group sums zero, certified
/// against [`RankProfile::BothTr0`].
pub fn gen_both_tr0_tns(d: usize, seed: u64, max_attempts: usize, cert: Certification) -> Result<(RealMatrix, TnsReport)> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    let profile = RankProfile::BothTr0 { d };
    for attempt in 0..max_attempts.max(1) {
        let mut rng = seeded_rng(derive_seed(seed, attempt as u64));
        let v = both_tr0_block(d, d * d, &mut rng);
        let mut report = verify_rank_profile(&v, profile, cert, derive_seed(seed, 1 << 32 | attempt as u64));
        if report.pass() {
            report.attempts = attempt + 1;
            return Ok((v, report));
        }
    }
    Err(Error::CertificationFailed { what: format!("both-tr0 matrix (d={d})"), attempts: max_attempts })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `σ_min / σ_max` of the submatrix (0 for a zero submatrix).
fn singular_ratio(v: &RealMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| v[(rows[r], cols[c])]);
    let sv = sub.singular_values();
    let mx = sv.iter().cloned().fold(0.0, f64::max);
    let mn = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if mx == 0.0 {
        0.0
    } else {
        mn / mx
    }
}

/// Row and column index sets of a submatrix.
type Submatrix = (Vec<usize>, Vec<usize>);

fn check_pairs(v: &RealMatrix, pairs: Vec<Submatrix>, exhaustive: bool) -> TnsReport {
    let results: Vec<(f64, Option<Submatrix>)> = pairs
        .into_par_iter()
        .map(|(r, c)| {
            let ratio = singular_ratio(v, &r, &c);
            let bad = if ratio > RANK_RATIO { None } else { Some((r, c)) };
            (ratio, bad)
        })
        .collect();
    let mut report = TnsReport::empty(exhaustive);
    report.submatrices_checked = results.len() as u64;
    for (ratio, bad) in results {
        report.min_singular_value_seen = report.min_singular_value_seen.min(ratio);
        if let Some(b) = bad {
            report.violation_count += 1;
            if report.violations.len() < MAX_RECORDED_VIOLATIONS * 4 {
                report.violations.push(b);
            }
        }
    }
    report.violations.sort();
    report.violations.truncate(MAX_RECORDED_VIOLATIONS);
    report
}

fn sorted_sample<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut v = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// Checks that every `r × f(r)` submatrix has full rank `f(r)` for all
/// `1 ≤ r ≤ rows`. Exhaustive when the total submatrix count fits in the
/// budget, otherwise `sample_count` random pairs per `r`.
pub fn verify_rank_profile(v: &RealMatrix, profile: RankProfile, cert: Certification, seed: u64) -> TnsReport {
    let (nr, nc) = v.shape();
    let total: u128 = (1..=nr).map(|r| binomial(nr, r).saturating_mul(binomial(nc, profile.f(r, nc)))).sum();
    let exhaustive = total <= cert.exhaustive_budget as u128;
    let mut report = TnsReport::empty(exhaustive);
    let mut rng = seeded_rng(seed);
    for r in 1..=nr {
        let f = profile.f(r, nc);
        if f == 0 {
            continue;
        }
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = if exhaustive {
            let col_sets: Vec<Vec<usize>> = (0..nc).combinations(f).collect();
            (0..nr)
                .combinations(r)
                .flat_map(|rows| col_sets.iter().map(move |cols| (rows.clone(), cols.clone())))
                .collect()
        } else {
            (0..cert.sample_count).map(|_| (sorted_sample(&mut rng, nr, r), sorted_sample(&mut rng, nc, f))).collect()
        };
        report.merge(check_pairs(v, pairs, exhaustive));
    }
    report
}

/// Checks the hypothesis of the zero-count bound with all columns of `v`:
/// every `r × cols` submatrix has full column rank. Then any nonzero
/// combination of the columns has at most `r − 1` zero entries.
pub fn verify_column_rank(v: &RealMatrix, r: usize, cert: Certification, seed: u64) -> TnsReport {
    let (nr, nc) = v.shape();
    if nc == 0 {
        return TnsReport::empty(true);
    }
    if r > nr || r < nc {
        let mut rep = TnsReport::empty(true);
        rep.violation_count = 1;
        rep.violations.push(((0..nr).collect(), (0..nc).collect()));
        return rep;
    }
    let cols: Vec<usize> = (0..nc).collect();
    let exhaustive = binomial(nr, r) <= cert.exhaustive_budget as u128;
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = if exhaustive {
        (0..nr).combinations(r).map(|rows| (rows, cols.clone())).collect()
    } else {
        let mut rng = seeded_rng(seed);
        (0..cert.sample_count).map(|_| (sorted_sample(&mut rng, nr, r), cols.clone())).collect()
    };
    check_pairs(v, pairs, exhaustive)
}

/// Outcome of [`col_combo_zero_bound`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComboReport {
    pub trials: usize,
    pub bound: usize,
    pub max_zeros_seen: usize,
    pub failures: usize,
}

impl ComboReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Draws random combinations of `c` random columns and counts entries below
/// `1e-9 ·` (largest chosen column norm); each must have at most `r − 1`.
pub fn col_combo_zero_bound(v: &RealMatrix, c: usize, r: usize, trials: usize, seed: u64) -> Result<ComboReport> {
    let (nr, nc) = v.shape();
    if c == 0 || c > r || r > nr || c > nc {
        return Err(Error::InvalidArgument(format!("need 1 ≤ c ≤ r ≤ rows and c ≤ cols (c={c}, r={r})")));
    }
    let mut rng = seeded_rng(seed);
    let mut report = ComboReport { trials, bound: r - 1, max_zeros_seen: 0, failures: 0 };
    for _ in 0..trials {
        let cols = sorted_sample(&mut rng, nc, c);
        let coeffs = loop {
            let x = unit_sphere(c, &mut rng);
            if x.iter().all(|a| a.abs() >= 1e-3) {
                break x;
            }
        };
        let scale = cols.iter().map(|&j| v.column(j).norm()).fold(0.0, f64::max);
        let tau = 1e-9 * scale;
        let zeros = (0..nr)
            .filter(|&i| cols.iter().zip(&coeffs).map(|(&j, a)| a * v[(i, j)]).sum::<f64>().abs() <= tau)
            .count();
        report.max_zeros_seen = report.max_zeros_seen.max(zeros);
        if zeros > r - 1 {
            report.failures += 1;
        }
    }
    Ok(report)
}
