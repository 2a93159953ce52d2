//! Simulated measurement of channels against observable sets, pairwise
//! discrimination, and reconstruction.

pub mod choi;
pub mod experiment;
pub mod unitary;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_extended, choi_from_kraus, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{derive_seed, seeded_rng, ComplexMatrix, HermitianMatrix, C64};
use crate::observables::{expectation, ObservableSet};

pub use choi::{reconstruct_choi, ChoiOptions, ChoiReconstruction};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, Task, Tolerances, TrialRecord};
pub use unitary::{reconstruct_unitary, Method, ReconstructOptions, UnitaryReconstruction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MeasurementMode {
    Exact,
    Sampled { shots: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationVector {
    pub values: Vec<f64>,
    pub mode: MeasurementMode,
    /// Per-component standard error `c / √shots` for sampled vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_errors: Option<Vec<f64>>,
}

impl ExpectationVector {
    pub fn exact(values: Vec<f64>) -> Self {
        Self { values, mode: MeasurementMode::Exact, standard_errors: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_dims(set: &ObservableSet, ch: &KrausChannel) -> Result<()> {
    if ch.dim() != set.d {
        return Err(Error::DimensionMismatch(format!(
            "observable set is for d={} but the channel has d={}",
            set.d,
            ch.dim()
        )));
    }
    Ok(())
}

/// `tr(H_i J(Φ))` for every observable.
pub fn measure_exact(set: &ObservableSet, ch: &KrausChannel) -> Result<ExpectationVector> {
    check_dims(set, ch)?;
    let j = choi_from_kraus(ch)?;
    let values = set.observables.iter().map(|o| expectation(&o.h, &j)).collect::<Result<Vec<_>>>()?;
    Ok(ExpectationVector::exact(values))
}

/// `tr(P ρ)` for Hermitian `P`.
fn tr_prod(p: &HermitianMatrix, rho: &ComplexMatrix) -> f64 {
    let (a, b) = (p.as_dmatrix(), rho.as_dmatrix());
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s.re
}

/// `(p₊, c)` for every observable: the probability of outcome `+1` on
/// `(Φ ⊗ id)(ξ)` and the observable's scale.
pub fn outcome_probabilities(set: &ObservableSet, ch: &KrausChannel) -> Result<Vec<(f64, f64)>> {
    check_dims(set, ch)?;
    let mut rho: Option<ComplexMatrix> = None;
    set.observables
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let dec = o.decomposition.as_ref().ok_or(Error::MissingDecomposition(i))?;
            if rho.is_none() {
                rho = Some(apply_extended(ch, dec.xi.as_complex())?);
            }
            let r = rho.as_ref().expect("set above");
            Ok((tr_prod(&dec.p_plus, r), o.scale))
        })
        .collect()
}

/// Expectations through the operational path: `c · (tr(P₊ρ) − tr(P₋ρ))`.
pub fn measure_operational(set: &ObservableSet, ch: &KrausChannel) -> Result<ExpectationVector> {
    check_dims(set, ch)?;
    let mut values = Vec::with_capacity(set.len());
    let mut rho: Option<ComplexMatrix> = None;
    for (i, o) in set.observables.iter().enumerate() {
        let dec = o.decomposition.as_ref().ok_or(Error::MissingDecomposition(i))?;
        if rho.is_none() {
            rho = Some(apply_extended(ch, dec.xi.as_complex())?);
        }
        let r = rho.as_ref().expect("set above");
        values.push(o.scale * (tr_prod(&dec.p_plus, r) - tr_prod(&dec.p_minus, r)));
    }
    Ok(ExpectationVector::exact(values))
}

/// Finite-shot estimate: `shots` outcomes per observable, value `c(2p̂₊ − 1)`.
pub fn measure_sampled(set: &ObservableSet, ch: &KrausChannel, shots: u64, seed: u64) -> Result<ExpectationVector> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let probs = outcome_probabilities(set, ch)?;
    let draws: Vec<Result<(f64, f64)>> = probs
        .par_iter()
        .enumerate()
        .map(|(i, &(p, c))| {
            let p = p.clamp(0.0, 1.0);
            let dist = Binomial::new(shots, p).map_err(|e| Error::InvalidArgument(format!("binomial: {e}")))?;
            let k = dist.sample(&mut seeded_rng(derive_seed(seed, i as u64)));
            let phat = k as f64 / shots as f64;
            Ok((c * (2.0 * phat - 1.0), c / (shots as f64).sqrt()))
        })
        .collect();
    let (values, errs): (Vec<f64>, Vec<f64>) = draws.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(ExpectationVector { values, mode: MeasurementMode::Sampled { shots }, standard_errors: Some(errs) })
}

/// Largest componentwise difference of the exact expectation vectors.
pub fn expectation_gap(set: &ObservableSet, phi: &KrausChannel, psi: &KrausChannel) -> Result<f64> {
    let a = measure_exact(set, phi)?;
    let b = measure_exact(set, psi)?;
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Whether some observable separates the two channels by more than `tol`.
pub fn discriminate_pair(set: &ObservableSet, phi: &KrausChannel, psi: &KrausChannel, tol: f64) -> Result<bool> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch("channels act on different dimensions".into()));
    }
    Ok(expectation_gap(set, phi, psi)? > tol)
}

/// Whether two measured vectors differ and their largest componentwise gap.
/// A component separates when its difference exceeds `tol`, or, for sampled
/// vectors, `max(tol, sigmas · √(σ_a² + σ_b²))`.
pub fn separation(a: &ExpectationVector, b: &ExpectationVector, tol: f64, sigmas: f64) -> Result<(bool, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("vectors of length {} and {}", a.len(), b.len())));
    }
    let mut separated = false;
    let mut gap: f64 = 0.0;
    for i in 0..a.len() {
        let diff = (a.values[i] - b.values[i]).abs();
        gap = gap.max(diff);
        let threshold = match (&a.standard_errors, &b.standard_errors) {
            (Some(sa), Some(sb)) => tol.max(sigmas * sa[i].hypot(sb[i])),
            _ => tol,
        };
        separated |= diff > threshold;
    }
    Ok((separated, gap))
}

/// `|tr(U†V)| / d`.
pub fn unitary_fidelity(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.rows() != v.rows() || !u.is_square() || !v.is_square() {
        return Err(Error::DimensionMismatch("fidelity needs equal square matrices".into()));
    }
    let t = u.adjoint().mul(v)?.trace();
    Ok((t.norm() / u.rows() as f64).min(1.0))
}
