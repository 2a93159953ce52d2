//! Least-squares recovery of a unitary channel from its expectation vector,
//! by local descent on the unitary group with random restarts.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    derive_seed, from_hermitian_coordinates, haar_unitary_from_rng, seeded_rng, ComplexMatrix, HermitianMatrix, C64,
};
use crate::observables::ObservableSet;

use super::{unitary_fidelity, ExpectationVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Riemannian gradient descent with Armijo backtracking.
    GradientDescent,
    /// Damped Gauss–Newton in the Lie algebra at the current point.
    LevenbergMarquardt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Convergence threshold on the residual `√f`.
    pub tol: f64,
    pub method: Method,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self { restarts: 20, max_iters: 2000, tol: 1e-10, method: Method::LevenbergMarquardt }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryReconstruction {
    pub unitary: ComplexMatrix,
    /// `√f` at the returned point.
    pub residual: f64,
    pub fidelity_to_truth: Option<f64>,
    pub restarts_used: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl UnitaryReconstruction {
    pub fn with_truth(mut self, truth: &ComplexMatrix) -> Result<Self> {
        self.fidelity_to_truth = Some(unitary_fidelity(truth, &self.unitary)?);
        Ok(self)
    }
}

/// `f(U) = Σᵢ (ψ† Hᵢ ψ − mᵢ)²` with `ψ = vec(U)`, `ψ[a·d + i] = U[a][i]`.
#[derive(Clone, Debug)]
pub struct UnitaryObjective {
    d: usize,
    hs: Vec<DMatrix<C64>>,
    targets: Vec<f64>,
    generators: Vec<DMatrix<C64>>,
}

fn vec_of(u: &DMatrix<C64>) -> DVector<C64> {
    let d = u.nrows();
    DVector::from_fn(d * d, |k, _| u[(k / d, k % d)])
}

fn unvec(v: &DVector<C64>, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |a, i| v[a * d + i])
}

/// `exp(iA) U` for Hermitian `A`.
fn retract(a: &HermitianMatrix, u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (vals, vecs) = a.eigh()?;
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|&l| C64::from_polar(1.0, l))));
    Ok(&vecs * phases * vecs.adjoint() * u)
}

impl UnitaryObjective {
    pub fn new(set: &ObservableSet, target: &ExpectationVector) -> Result<Self> {
        if target.len() != set.len() {
            return Err(Error::DimensionMismatch(format!(
                "target has {} values for {} observables",
                target.len(),
                set.len()
            )));
        }
        let d = set.d;
        let generators = (0..d * d)
            .map(|k| {
                let mut e = vec![0.0; d * d];
                e[k] = 1.0;
                from_hermitian_coordinates(d, &e).map(|h| h.as_dmatrix().clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d,
            hs: set.observables.iter().map(|o| o.h.as_dmatrix().clone()).collect(),
            targets: target.values.clone(),
            generators,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn check(&self, u: &ComplexMatrix) -> Result<()> {
        if u.rows() != self.d || u.cols() != self.d {
            return Err(Error::DimensionMismatch(format!("expected a {0}x{0} matrix", self.d)));
        }
        Ok(())
    }

    /// `(rᵢ, Hᵢψ)` pairs.
    fn parts(&self, u: &DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
        let psi = vec_of(u);
        let hpsi: Vec<DVector<C64>> = self.hs.iter().map(|h| h * &psi).collect();
        let r = hpsi.iter().zip(&self.targets).map(|(hp, m)| psi.dotc(hp).re - m).collect();
        (r, hpsi)
    }

    pub fn residuals(&self, u: &ComplexMatrix) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self.parts(u.as_dmatrix()).0)
    }

    pub fn value(&self, u: &ComplexMatrix) -> Result<f64> {
        Ok(self.residuals(u)?.iter().map(|r| r * r).sum())
    }

    fn value_raw(&self, u: &DMatrix<C64>) -> f64 {
        self.parts(u).0.iter().map(|r| r * r).sum()
    }

    fn gradient_raw(&self, u: &DMatrix<C64>) -> DMatrix<C64> {
        let (r, hpsi) = self.parts(u);
        let mut g = DVector::<C64>::zeros(self.d * self.d);
        for (ri, hp) in r.iter().zip(&hpsi) {
            g.axpy(C64::new(4.0 * ri, 0.0), hp, C64::new(1.0, 0.0));
        }
        let gm = unvec(&g, self.d);
        let m = u * gm.adjoint();
        (&m - m.adjoint()) * C64::new(0.0, 0.5)
    }

    /// Hermitian `Γ` with `d/dε f(exp(iεA)U)|₀ = tr(AΓ)` for Hermitian `A`.
    pub fn manifold_gradient(&self, u: &ComplexMatrix) -> Result<HermitianMatrix> {
        self.check(u)?;
        HermitianMatrix::new(ComplexMatrix::from_dmatrix(self.gradient_raw(u.as_dmatrix()))?)
    }

    /// `∂rᵢ/∂θ_k` for `U(θ) = exp(iΣθ_k T_k) U`.
    fn jacobian(&self, u: &DMatrix<C64>, hpsi: &[DVector<C64>]) -> DMatrix<f64> {
        let dirs: Vec<DVector<C64>> = self.generators.iter().map(|t| vec_of(&(t * u * C64::new(0.0, 1.0)))).collect();
        DMatrix::from_fn(hpsi.len(), dirs.len(), |i, k| 2.0 * hpsi[i].dotc(&dirs[k]).re)
    }

    fn step_matrix(&self, delta: &DVector<f64>) -> Result<HermitianMatrix> {
        let mut a = DMatrix::<C64>::zeros(self.d, self.d);
        for (t, &x) in self.generators.iter().zip(delta.iter()) {
            a += t * C64::new(x, 0.0);
        }
        HermitianMatrix::new(ComplexMatrix::from_dmatrix(a)?)
    }

    fn descend_gd(&self, mut u: DMatrix<C64>, opts: &ReconstructOptions) -> Result<(DMatrix<C64>, usize)> {
        let mut f = self.value_raw(&u);
        let mut eta = 0.1;
        for it in 0..opts.max_iters {
            if f.sqrt() < opts.tol {
                return Ok((u, it));
            }
            let g = self.gradient_raw(&u);
            let gn2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
            if gn2 < 1e-32 {
                return Ok((u, it));
            }
            let gh = HermitianMatrix::new(ComplexMatrix::from_dmatrix(g)?)?;
            eta *= 2.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand = retract(&gh.scale(-eta), &u)?;
                let fc = self.value_raw(&cand);
                if fc <= f - 1e-4 * eta * gn2 {
                    u = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if !accepted {
                return Ok((u, it + 1));
            }
        }
        Ok((u, opts.max_iters))
    }

    fn descend_lm(&self, mut u: DMatrix<C64>, opts: &ReconstructOptions) -> Result<(DMatrix<C64>, usize)> {
        let mut lambda = 1e-3;
        for it in 0..opts.max_iters {
            let (r, hpsi) = self.parts(&u);
            let f: f64 = r.iter().map(|x| x * x).sum();
            if f.sqrt() < opts.tol {
                return Ok((u, it));
            }
            let jac = self.jacobian(&u, &hpsi);
            let rv = DVector::from_vec(r);
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * &rv;
            let scale = (jtj.trace() / jtj.nrows() as f64).max(1e-300);
            let mut accepted = false;
            for _ in 0..40 {
                let mut a = jtj.clone();
                for k in 0..a.nrows() {
                    a[(k, k)] += lambda * scale;
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= 4.0;
                    continue;
                };
                let delta = -chol.solve(&g);
                let cand = retract(&self.step_matrix(&delta)?, &u)?;
                let fc = self.value_raw(&cand);
                if fc < f {
                    u = cand;
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted {
                return Ok((u, it + 1));
            }
        }
        Ok((u, opts.max_iters))
    }

    /// Runs one local descent from `start`.
    pub fn descend(&self, start: &ComplexMatrix, opts: &ReconstructOptions) -> Result<(ComplexMatrix, usize)> {
        self.check(start)?;
        let u0 = start.as_dmatrix().clone();
        let (u, iters) = match opts.method {
            Method::GradientDescent => self.descend_gd(u0, opts)?,
            Method::LevenbergMarquardt => self.descend_lm(u0, opts)?,
        };
        Ok((ComplexMatrix::from_dmatrix(polar(u))?, iters))
    }
}

/// Nearest unitary, removing drift accumulated by repeated retractions.
fn polar(u: DMatrix<C64>) -> DMatrix<C64> {
    let svd = u.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(a), Some(b)) => a * b,
        _ => unreachable!("requested both factors"),
    }
}

/// Best unitary over `opts.restarts` Haar-random starts; stops early once
/// the residual drops below `opts.tol`.
pub fn reconstruct_unitary(
    set: &ObservableSet,
    target: &ExpectationVector,
    opts: ReconstructOptions,
    seed: u64,
) -> Result<UnitaryReconstruction> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let obj = UnitaryObjective::new(set, target)?;
    let mut best: Option<UnitaryReconstruction> = None;
    let mut iterations = 0;
    for r in 0..opts.restarts {
        let start = haar_unitary_from_rng(set.d, &mut seeded_rng(derive_seed(seed, r as u64)));
        let (u, it) = obj.descend(&start, &opts)?;
        iterations += it;
        let residual = obj.value(&u)?.sqrt();
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(UnitaryReconstruction {
                unitary: u,
                residual,
                fidelity_to_truth: None,
                restarts_used: r + 1,
                iterations: 0,
                converged: residual < opts.tol,
            });
        }
        if residual < opts.tol {
            break;
        }
    }
    let mut out = best.expect("at least one restart");
    out.iterations = iterations;
    Ok(out)
}
