//! Batches of independent discrimination or reconstruction trials.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{choi_from_kraus, KrausChannel};
use crate::error::Result;
use crate::linalg::{derive_seed, haar_unitary_from_rng, seeded_rng, ComplexMatrix};
use crate::observables::{build_observable_set, ObservableSet, Question};
use crate::subspaces::BuildOptions;

use super::{
    choi::{reconstruct_choi, ChoiOptions},
    measure_exact, measure_sampled, separation,
    unitary::{reconstruct_unitary, ReconstructOptions},
    ExpectationVector,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    #[default]
    Discriminate,
    Reconstruct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Expectation gap above which two channels count as distinguished.
    pub discrimination: f64,
    /// Pairs closer than this in Frobenius norm are treated as equal.
    pub channel_distance: f64,
    /// Reconstruction succeeds at fidelity `≥ 1 − fidelity`.
    pub fidelity: f64,
    /// Residual threshold for the reconstruction optimizer.
    pub residual: f64,
    /// Frobenius error accepted for experimental Choi reconstruction.
    pub choi_error: f64,
    /// Number of standard errors separating sampled vectors.
    pub sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { discrimination: 1e-8, channel_distance: 1e-6, fidelity: 1e-6, residual: 1e-10, choi_error: 1e-6, sigmas: 5.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub q: usize,
    pub question: Question,
    pub trials: usize,
    pub shots: Option<u64>,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(d: usize, q: usize, question: Question, trials: usize, seed: u64) -> Self {
        Self {
            d,
            q,
            question,
            trials,
            shots: None,
            seed,
            tolerances: Tolerances::default(),
            task: Task::Discriminate,
            restarts: None,
            max_iters: None,
        }
    }

    fn reconstruct_options(&self) -> ReconstructOptions {
        let base = ReconstructOptions::default();
        ReconstructOptions {
            restarts: self.restarts.unwrap_or(base.restarts),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            tol: self.tolerances.residual,
            ..base
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub observable_count: usize,
    pub trials: usize,
    pub successes: usize,
    /// `None` for an empty run.
    pub success_rate: Option<f64>,
    pub records: Vec<TrialRecord>,
    /// Kept out of serialized artifacts so they stay reproducible.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    /// One CSV line per trial.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut out = String::from("trial,seed,success,gap,channel_distance,fidelity,choi_error,residual,restarts_used,converged,error\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.trial,
                r.seed,
                r.success,
                opt(r.gap),
                opt(r.channel_distance),
                opt(r.fidelity),
                opt(r.choi_error),
                opt(r.residual),
                r.restarts_used.map(|x| x.to_string()).unwrap_or_default(),
                r.converged.map(|x| x.to_string()).unwrap_or_default(),
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            ));
        }
        out
    }
}

/// The pair of channels drawn for one discrimination trial.
fn draw_pair(cfg: &ExperimentConfig, seed: u64) -> Result<(KrausChannel, KrausChannel)> {
    let mut rng = seeded_rng(seed);
    let (d, q) = (cfg.d, cfg.q);
    Ok(match cfg.question {
        Question::AmongRankQ => (KrausChannel::random(d, q, &mut rng)?, KrausChannel::random(d, q, &mut rng)?),
        Question::AmongAll => (KrausChannel::random(d, q, &mut rng)?, KrausChannel::random(d, q + 1, &mut rng)?),
        Question::AmongUnital => {
            (KrausChannel::random_mixed_unitary(d, q, &mut rng)?, KrausChannel::random_mixed_unitary(d, q + 1, &mut rng)?)
        }
    })
}

fn targets(set: &ObservableSet, ch: &KrausChannel, shots: Option<u64>, seed: u64) -> Result<ExpectationVector> {
    match shots {
        None => measure_exact(set, ch),
        Some(s) => measure_sampled(set, ch, s, seed),
    }
}

fn discrimination_trial(set: &ObservableSet, cfg: &ExperimentConfig, rec: &mut TrialRecord) -> Result<()> {
    let (phi, psi) = draw_pair(cfg, derive_seed(rec.seed, 0))?;
    let dist = choi_from_kraus(&phi)?.matrix().sub(choi_from_kraus(&psi)?.matrix())?.as_complex().frobenius();
    let a = targets(set, &phi, cfg.shots, derive_seed(rec.seed, 1))?;
    let b = targets(set, &psi, cfg.shots, derive_seed(rec.seed, 2))?;
    let (separated, gap) = separation(&a, &b, cfg.tolerances.discrimination, cfg.tolerances.sigmas)?;
    rec.gap = Some(gap);
    rec.channel_distance = Some(dist);
    rec.success = separated == (dist > cfg.tolerances.channel_distance);
    Ok(())
}

fn reconstruction_trial(set: &ObservableSet, cfg: &ExperimentConfig, rec: &mut TrialRecord) -> Result<()> {
    let mut rng = seeded_rng(derive_seed(rec.seed, 0));
    if cfg.q == 1 {
        let u: ComplexMatrix = haar_unitary_from_rng(cfg.d, &mut rng);
        let t = targets(set, &KrausChannel::unitary(u.clone())?, cfg.shots, derive_seed(rec.seed, 1))?;
        let r = reconstruct_unitary(set, &t, cfg.reconstruct_options(), derive_seed(rec.seed, 2))?.with_truth(&u)?;
        let fid = r.fidelity_to_truth.unwrap_or(0.0);
        rec.fidelity = Some(fid);
        rec.residual = Some(r.residual);
        rec.restarts_used = Some(r.restarts_used);
        rec.converged = Some(r.converged);
        rec.success = fid >= 1.0 - cfg.tolerances.fidelity;
    } else {
        let ch = KrausChannel::random(cfg.d, cfg.q, &mut rng)?;
        let t = targets(set, &ch, cfg.shots, derive_seed(rec.seed, 1))?;
        let opts = ChoiOptions { rank: cfg.q, max_iters: cfg.max_iters.unwrap_or(5000), tol: cfg.tolerances.residual };
        let r = reconstruct_choi(set, &t, opts)?;
        let err = r.choi.matrix().sub(choi_from_kraus(&ch)?.matrix())?.as_complex().frobenius();
        rec.choi_error = Some(err);
        rec.residual = Some(r.residual);
        rec.converged = Some(r.converged);
        rec.success = err <= cfg.tolerances.choi_error;
    }
    Ok(())
}

/// Runs `config.trials` trials in parallel; per-trial errors are recorded.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let set = build_observable_set(config.d, config.q, config.question, config.seed, BuildOptions::default())?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rec = TrialRecord { trial: t, seed: derive_seed(config.seed, 1_000_000 + t as u64), ..Default::default() };
            let outcome = match config.task {
                Task::Discriminate => discrimination_trial(&set, config, &mut rec),
                Task::Reconstruct => reconstruction_trial(&set, config, &mut rec),
            };
            if let Err(e) = outcome {
                rec.success = false;
                rec.error = Some(e.to_string());
            }
            rec
        })
        .collect();
    let successes = records.iter().filter(|r| r.success).count();
    let success_rate = (config.trials > 0).then(|| successes as f64 / config.trials as f64);
    Ok(ExperimentReport {
        version: VERSION.to_string(),
        config: config.clone(),
        observable_count: set.len(),
        trials: config.trials,
        successes,
        success_rate,
        records,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_give_an_empty_report() {
        let rep = run_experiment(&ExperimentConfig::new(2, 1, Question::AmongRankQ, 0, 1)).unwrap();
        assert_eq!(rep.trials, 0);
        assert!(rep.records.is_empty());
        assert_eq!(rep.success_rate, None);
        assert_eq!(rep.observable_count, 6);
    }

    #[test]
    fn discrimination_small_run() {
        let rep = run_experiment(&ExperimentConfig::new(2, 1, Question::AmongRankQ, 20, 3)).unwrap();
        assert_eq!(rep.success_rate, Some(1.0));
        assert_eq!(rep.records.len(), 20);
        let again = run_experiment(&ExperimentConfig::new(2, 1, Question::AmongRankQ, 20, 3)).unwrap();
        assert_eq!(rep.records, again.records);
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn reconstruction_small_run() {
        let mut cfg = ExperimentConfig::new(2, 1, Question::AmongRankQ, 5, 4);
        cfg.task = Task::Reconstruct;
        let rep = run_experiment(&cfg).unwrap();
        assert!(rep.successes >= 4, "{rep:?}");
    }

    #[test]
    fn sampled_discrimination_uses_standard_errors() {
        let mut cfg = ExperimentConfig::new(2, 1, Question::AmongAll, 10, 5);
        cfg.shots = Some(100_000);
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.records.len(), 10);
        assert!(rep.records.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::new(3, 1, Question::AmongUnital, 7, 9);
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&s).unwrap(), cfg);
        let minimal: ExperimentConfig =
            serde_json::from_str(r#"{"d":2,"q":1,"question":"among_all","trials":3,"shots":null,"seed":1}"#).unwrap();
        assert_eq!(minimal.task, Task::Discriminate);
        assert_eq!(minimal.tolerances, Tolerances::default());
    }
}
