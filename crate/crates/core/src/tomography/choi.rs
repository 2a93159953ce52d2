//! Experimental recovery of a Kraus-rank-`q` channel: alternating
//! projections between the affine set fixed by the measurements and
//! `tr_Y(J) = I`, and the PSD matrices of rank at most `q`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channel::{ChoiFlags, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{from_hermitian_coordinates, hermitian_coordinates, HermitianMatrix};
use crate::observables::ObservableSet;

use super::ExpectationVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChoiOptions {
    pub rank: usize,
    pub max_iters: usize,
    /// Stop once the distance between the two projections falls below this.
    pub tol: f64,
}

impl Default for ChoiOptions {
    fn default() -> Self {
        Self { rank: 1, max_iters: 5000, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiReconstruction {
    /// PSD, rank at most `rank`; trace preservation holds only approximately.
    pub choi: ChoiMatrix,
    /// Euclidean norm of the measurement misfit.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Keeps the `rank` largest nonnegative eigenvalues.
fn truncate_psd(x: &HermitianMatrix, rank: usize) -> Result<HermitianMatrix> {
    let (vals, vecs) = x.eigh()?;
    let n = vals.len();
    let mut out = DMatrix::<crate::linalg::C64>::zeros(n, n);
    for k in (n.saturating_sub(rank)..n).rev() {
        if vals[k] > 0.0 {
            let v = vecs.column(k);
            out += v * v.adjoint() * crate::linalg::C64::new(vals[k], 0.0);
        }
    }
    Ok(HermitianMatrix::symmetrize(crate::linalg::ComplexMatrix::from_dmatrix(out)?))
}

pub fn reconstruct_choi(set: &ObservableSet, target: &ExpectationVector, opts: ChoiOptions) -> Result<ChoiReconstruction> {
    if target.len() != set.len() {
        return Err(Error::DimensionMismatch(format!("target has {} values for {} observables", target.len(), set.len())));
    }
    if opts.rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let d = set.d;
    let n = d * d;
    let len = n * n;
    let mut rows: Vec<Vec<f64>> = set.observables.iter().map(|o| hermitian_coordinates(&o.h)).collect();
    let mut b: Vec<f64> = target.values.clone();
    let id = HermitianMatrix::identity(d);
    for k in 0..d * d {
        let mut e = vec![0.0; d * d];
        e[k] = 1.0;
        let ek = from_hermitian_coordinates(d, &e)?;
        rows.push(hermitian_coordinates(&id.kron(&ek)));
        b.push(ek.trace());
    }
    let c = DMatrix::from_fn(rows.len(), len, |r, k| rows[r][k]);
    let b = DVector::from_vec(b);
    let pinv = c.clone().pseudo_inverse(1e-12).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let m_obs = set.len();
    let project_affine = |x: &DVector<f64>| -> DVector<f64> { x - &pinv * (&c * x - &b) };

    let mut x = DVector::from_vec(hermitian_coordinates(&HermitianMatrix::identity(n).scale(1.0 / d as f64)));
    let mut y = x.clone();
    let mut iterations = 0;
    let mut converged = false;
    for it in 0..opts.max_iters {
        iterations = it + 1;
        let yh = truncate_psd(&from_hermitian_coordinates(n, x.as_slice())?, opts.rank)?;
        y = DVector::from_vec(hermitian_coordinates(&yh));
        let nx = project_affine(&y);
        let gap = (&nx - &y).norm();
        x = nx;
        if gap < opts.tol {
            converged = true;
            break;
        }
    }
    let misfit = &c * &y - &b;
    let residual = misfit.rows(0, m_obs).norm();
    let matrix = from_hermitian_coordinates(n, y.as_slice())?;
    let choi = ChoiMatrix::new(d, matrix, ChoiFlags { psd: true, ..Default::default() })?;
    Ok(ChoiReconstruction { choi, residual, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{choi_from_kraus, KrausChannel};
    use crate::linalg::haar_unitary;
    use crate::observables::{build_observable_set, Question};
    use crate::subspaces::BuildOptions;
    use crate::tomography::measure_exact;

    #[test]
    fn full_measurement_recovers_a_unitary_choi() {
        let set = build_observable_set(2, 1, Question::AmongAll, 7, BuildOptions::default()).unwrap();
        let ch = KrausChannel::unitary(haar_unitary(2, 3)).unwrap();
        let t = measure_exact(&set, &ch).unwrap();
        let r = reconstruct_choi(&set, &t, ChoiOptions::default()).unwrap();
        let truth = choi_from_kraus(&ch).unwrap();
        let err = r.choi.matrix().max_diff(truth.matrix()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(err < 1e-6, "{err}");
        assert!(r.residual < 1e-8);
    }

    #[test]
    fn truncation_keeps_the_top_eigenvalues() {
        let h = HermitianMatrix::from_real_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 2.0]]).unwrap();
        let t = truncate_psd(&h, 1).unwrap();
        assert_eq!(t.eigenvalues().unwrap().iter().filter(|l| l.abs() > 1e-12).count(), 1);
        assert!((t.get(0, 0).re - 3.0).abs() < 1e-12);
        let t2 = truncate_psd(&h, 3).unwrap();
        assert!((t2.trace() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let set = build_observable_set(2, 1, Question::AmongAll, 7, BuildOptions::default()).unwrap();
        let t = ExpectationVector::exact(vec![0.0; 2]);
        assert!(reconstruct_choi(&set, &t, ChoiOptions::default()).is_err());
        let t = ExpectationVector::exact(vec![0.0; set.len()]);
        assert!(reconstruct_choi(&set, &t, ChoiOptions { rank: 0, ..Default::default() }).is_err());
    }
}
