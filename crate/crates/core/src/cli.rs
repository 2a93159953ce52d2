//! Command-line front end. Exit codes: 0 success, 1 verification failure
//! (the report is still written), 2 usage or input error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::io::{self, VERSION};
use crate::linalg::{haar_unitary, seeded_rng, ComplexMatrix, C64};
use crate::observables::{build_observable_set, clifford_set_d2, ObservableSet, Question};
use crate::subspaces::{build, verify_subspace, BuildOptions, Kind, SubspaceKind};
use crate::tns::{self, Certification, RankProfile, RealMatrix};
use crate::tomography::{
    measure_exact, measure_sampled, reconstruct_choi, reconstruct_unitary, run_experiment, separation, ChoiOptions,
    ExperimentConfig, Method, ReconstructOptions, Task, Tolerances,
};

#[derive(Debug, Parser)]
#[command(name = "unitom", version, about = "Interactive observables for unitary and low-Kraus-rank process tomography")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, env = "UNITOM_THREADS", global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a certified rank-structured real matrix.
    GenTns(GenTnsArgs),
    /// Build a discriminating subspace basis.
    GenSubspace(GenSubspaceArgs),
    /// Check a basis file by random sampling.
    VerifySubspace(VerifySubspaceArgs),
    /// Build an interactive observable set.
    GenObservables(GenObservablesArgs),
    /// Simulate measuring a channel against an observable set.
    Measure(MeasureArgs),
    /// Decide whether an observable set separates two channels.
    Discriminate(DiscriminateArgs),
    /// Recover a channel from measured expectations.
    Reconstruct(ReconstructArgs),
    /// Run a batch of seeded discrimination or reconstruction trials.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum TnsKind {
    Vandermonde,
    Tr0,
    BothTr0,
}

fn parse_kind(s: &str) -> std::result::Result<Kind, String> {
    Kind::parse(s).map_err(|e| e.to_string())
}

fn parse_question(s: &str) -> std::result::Result<Question, String> {
    Question::parse(s).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    match s {
        "lm" | "levenberg_marquardt" => Ok(Method::LevenbergMarquardt),
        "gd" | "gradient_descent" => Ok(Method::GradientDescent),
        _ => Err(format!("unknown method '{s}' (expected lm or gd)")),
    }
}

fn kind_name<S: serde::Serializer>(k: &Kind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(k.name())
}

#[derive(Debug, Args, Serialize)]
pub struct GenTnsArgs {
    #[arg(long, value_enum)]
    pub kind: TnsKind,
    /// Block size, or the node count for a Vandermonde matrix.
    #[arg(long)]
    pub d: usize,
    /// Number of row groups with vanishing sums.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// One more than the number of unconstrained rows.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenSubspaceArgs {
    #[arg(long, value_parser = parse_kind)]
    #[serde(serialize_with = "kind_name")]
    pub kind: Kind,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifySubspaceArgs {
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GenObservablesArgs {
    #[arg(long, required_unless_present = "clifford")]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_parser = parse_question, default_value = "among_rank_q")]
    pub question: Question,
    #[arg(long, required_unless_present = "clifford")]
    pub seed: Option<u64>,
    /// Emit the local Clifford set for two qubits instead.
    #[arg(long, conflicts_with_all = ["d", "seed"])]
    pub clifford: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    /// Observable set file.
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    /// `identity`, `haar:SEED`, `random:Q:SEED`, or a channel file.
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscriminateArgs {
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub against: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReconstructArgs {
    #[arg(long = "in")]
    #[serde(skip)]
    pub input: PathBuf,
    /// Expectation vector file written by `measure`.
    #[arg(long)]
    #[serde(skip)]
    pub target: PathBuf,
    /// Channel to compare against, in the `--channel` syntax of `measure`.
    #[arg(long)]
    pub truth: Option<String>,
    /// Kraus rank; values above 1 use the experimental Choi solver.
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, value_parser = parse_method, default_value = "lm")]
    pub method: Method,
    /// Residual at which the solver stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config file; replaces the remaining flags.
    #[arg(long = "in", conflicts_with_all = ["d", "question", "trials", "seed"])]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_parser = parse_question, required_unless_present = "input")]
    pub question: Option<Question>,
    #[arg(long, required_unless_present = "input")]
    pub trials: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_parser = ["discriminate", "reconstruct"], default_value = "discriminate")]
    pub task: String,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Discrimination tolerance on the expectation gap.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial CSV summary.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Failure that maps to an exit code.
enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CertificationFailed { .. } | Error::RankDeficient { .. } | Error::EigenNonConvergence(_) => 1,
        _ => 2,
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // A global pool may already exist when called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> CliResult<i32> {
    match cmd {
        Command::GenTns(a) => gen_tns(a),
        Command::GenSubspace(a) => gen_subspace(a),
        Command::VerifySubspace(a) => verify(a),
        Command::GenObservables(a) => gen_observables(a),
        Command::Measure(a) => measure(a),
        Command::Discriminate(a) => discriminate(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn emit(out: Option<&Path>, doc: &Value) -> Result<()> {
    match out {
        Some(p) => io::write_json(p, doc),
        None => {
            print!("{}", io::to_json_string(doc)?);
            Ok(())
        }
    }
}

fn with_header(command: &str, config: &impl Serialize, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("documents are objects");
    obj.insert("version".into(), json!(VERSION));
    obj.insert("command".into(), json!(command));
    obj.insert("config".into(), serde_json::to_value(config).expect("plain data"));
    body
}

fn real_to_complex(m: &RealMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::from_dmatrix(m.map(|x| C64::new(x, 0.0)))
}

fn gen_tns(a: &GenTnsArgs) -> CliResult<i32> {
    let cert = Certification::default();
    let result = match a.kind {
        TnsKind::Vandermonde => {
            let nodes: Vec<f64> = (1..=a.d).map(|x| x as f64).collect();
            let v = tns::vandermonde(&nodes)?;
            let report = tns::verify_rank_profile(&v, RankProfile::FullTns, cert, a.seed.unwrap_or(0));
            Ok((v, report))
        }
        TnsKind::Tr0 => {
            let seed = a.seed.ok_or_else(|| usage("--seed is required for tr0"))?;
            tns::gen_tr0_tns(a.d, a.k, a.m, seed, tns::DEFAULT_MAX_ATTEMPTS, None, cert)
        }
        TnsKind::BothTr0 => {
            let seed = a.seed.ok_or_else(|| usage("--seed is required for both_tr0"))?;
            tns::gen_both_tr0_tns(a.d, seed, tns::DEFAULT_MAX_ATTEMPTS, cert)
        }
    };
    let (v, report) = match result {
        Ok(x) => x,
        Err(e @ Error::CertificationFailed { .. }) => {
            let doc = with_header("gen-tns", a, json!({ "error": e.to_string() }));
            emit(a.out.as_deref(), &doc)?;
            eprintln!("certification failed: {e}");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    let pass = report.pass();
    let doc = with_header(
        "gen-tns",
        a,
        json!({
            "matrix": io::matrix_value(&real_to_complex(&v)?),
            "certificate": serde_json::to_value(&report).map_err(Error::from)?,
        }),
    );
    emit(a.out.as_deref(), &doc)?;
    eprintln!(
        "{}x{} matrix, {} submatrices checked ({}), {} violations",
        v.nrows(),
        v.ncols(),
        report.submatrices_checked,
        if report.exhaustive { "exhaustive" } else { "sampled" },
        report.violation_count
    );
    Ok(if pass { 0 } else { 1 })
}

fn gen_subspace(a: &GenSubspaceArgs) -> CliResult<i32> {
    let sk = SubspaceKind::new(a.kind, a.d, a.q)?;
    let basis = build(sk, a.seed, BuildOptions::default())?;
    let doc = with_header("gen-subspace", a, io::basis_value(&basis));
    emit(a.out.as_deref(), &doc)?;
    eprintln!("{} basis for d={} q={}: {} elements", a.kind.name(), a.d, a.q, basis.elements.len());
    Ok(0)
}

fn verify(a: &VerifySubspaceArgs) -> CliResult<i32> {
    let v = io::read_value(&a.input)?;
    let basis = io::parse_basis(&v, "$")?;
    let report = verify_subspace(&basis, a.trials, a.seed)?;
    let doc = with_header(
        "verify-subspace",
        a,
        json!({
            "input": a.input.display().to_string(),
            "kind": basis.kind.kind.name(),
            "d": basis.kind.d,
            "q": basis.kind.q,
            "report": serde_json::to_value(&report).map_err(Error::from)?,
        }),
    );
    emit(a.out.as_deref(), &doc)?;
    if report.pass {
        eprintln!("pass: {} trials, min rank {}", report.trials, report.min_rank_seen);
        Ok(0)
    } else {
        eprintln!(
            "FAIL: cardinality_ok={} independence σ_min={:e} σ_max={:e} partial-trace deviation {:e}, {} sampling violations",
            report.cardinality_ok,
            report.independence_sigma_min,
            report.independence_sigma_max,
            report.partial_trace_deviation,
            report.violations.len()
        );
        for viol in report.violations.iter().take(5) {
            eprintln!("  trial {}: rank {} (+{} / -{})", viol.trial, viol.rank, viol.n_pos, viol.n_neg);
        }
        Ok(1)
    }
}

fn gen_observables(a: &GenObservablesArgs) -> CliResult<i32> {
    let set = if a.clifford {
        clifford_set_d2()?
    } else {
        let d = a.d.ok_or_else(|| usage("--d is required"))?;
        let seed = a.seed.ok_or_else(|| usage("--seed is required"))?;
        build_observable_set(d, a.q, a.question, seed, BuildOptions::default())?
    };
    let doc = with_header("gen-observables", a, io::observable_set_value(&set));
    emit(a.out.as_deref(), &doc)?;
    eprintln!("{} observables for d={} ({})", set.len(), set.d, set.question.name());
    Ok(0)
}

/// `identity`, `haar:SEED`, `random:Q:SEED` or a channel file.
pub fn parse_channel_spec(spec: &str, d: usize) -> Result<KrausChannel> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<u64> {
        s.parse().map_err(|_| Error::InvalidArgument(format!("'{s}' in channel spec '{spec}' is not an integer")))
    };
    match parts.as_slice() {
        ["identity"] => KrausChannel::identity(d),
        ["haar", seed] => KrausChannel::unitary(haar_unitary(d, num(seed)?)),
        ["random", q, seed] => KrausChannel::random(d, num(q)? as usize, &mut seeded_rng(num(seed)?)),
        _ => {
            let ch = io::parse_channel(&io::read_value(Path::new(spec))?, "$")?;
            if ch.dim() != d {
                return Err(Error::DimensionMismatch(format!("channel {spec} has d={} but the set has d={d}", ch.dim())));
            }
            Ok(ch)
        }
    }
}

fn load_set(path: &Path) -> Result<ObservableSet> {
    io::parse_observable_set(&io::read_value(path)?, "$")
}

fn measure(a: &MeasureArgs) -> CliResult<i32> {
    let set = load_set(&a.input)?;
    let ch = parse_channel_spec(&a.channel, set.d)?;
    let e = match a.shots {
        Some(shots) => {
            let seed = a.seed.ok_or_else(|| usage("--seed is required with --shots"))?;
            measure_sampled(&set, &ch, shots, seed)?
        }
        None => measure_exact(&set, &ch)?,
    };
    let doc = with_header("measure", a, io::expectation_value(&e));
    emit(a.out.as_deref(), &doc)?;
    eprintln!("{} expectation values", e.len());
    Ok(0)
}

fn discriminate(a: &DiscriminateArgs) -> CliResult<i32> {
    let set = load_set(&a.input)?;
    let phi = parse_channel_spec(&a.channel, set.d)?;
    let psi = parse_channel_spec(&a.against, set.d)?;
    let (ea, eb) = match a.shots {
        Some(shots) => {
            let seed = a.seed.ok_or_else(|| usage("--seed is required with --shots"))?;
            let s = crate::linalg::derive_seed;
            (measure_sampled(&set, &phi, shots, s(seed, 0))?, measure_sampled(&set, &psi, shots, s(seed, 1))?)
        }
        None => (measure_exact(&set, &phi)?, measure_exact(&set, &psi)?),
    };
    let (distinguished, gap) = separation(&ea, &eb, a.tol, Tolerances::default().sigmas)?;
    let doc = with_header("discriminate", a, json!({ "distinguished": distinguished, "gap": gap }));
    emit(a.out.as_deref(), &doc)?;
    eprintln!("{} (largest gap {gap:e})", if distinguished { "distinguished" } else { "not distinguished" });
    Ok(0)
}

fn reconstruct(a: &ReconstructArgs) -> CliResult<i32> {
    let set = load_set(&a.input)?;
    let target = io::parse_expectations(&io::read_value(&a.target)?, "$")?;
    if target.len() != set.len() {
        return Err(Error::Schema {
            path: "$.values".into(),
            message: format!("{} values for {} observables", target.len(), set.len()),
        }
        .into());
    }
    let truth = a.truth.as_deref().map(|s| parse_channel_spec(s, set.d)).transpose()?;
    if a.rank == 0 {
        return Err(usage("--rank must be at least 1"));
    }
    if a.rank == 1 {
        let opts = ReconstructOptions { restarts: a.restarts, tol: a.tol, method: a.method, ..Default::default() };
        let mut r = reconstruct_unitary(&set, &target, opts, a.seed)?;
        let mut ok = r.converged;
        if let Some(t) = &truth {
            if t.kraus_count() != 1 {
                return Err(usage("--truth must be a unitary channel when --rank is 1"));
            }
            r = r.with_truth(&t.kraus_ops()[0])?;
            ok &= r.fidelity_to_truth.is_some_and(|f| f >= 1.0 - Tolerances::default().fidelity);
        }
        let doc = with_header(
            "reconstruct",
            a,
            json!({
                "unitary": io::matrix_value(&r.unitary),
                "residual": r.residual,
                "fidelity_to_truth": r.fidelity_to_truth,
                "restarts_used": r.restarts_used,
                "iterations": r.iterations,
                "converged": r.converged,
            }),
        );
        emit(a.out.as_deref(), &doc)?;
        eprintln!("residual {:e} after {} restarts{}", r.residual, r.restarts_used, match r.fidelity_to_truth {
            Some(f) => format!(", fidelity {f:.12}"),
            None => String::new(),
        });
        Ok(if ok { 0 } else { 1 })
    } else {
        let r = reconstruct_choi(&set, &target, ChoiOptions { rank: a.rank, tol: a.tol, ..Default::default() })?;
        let error = match &truth {
            Some(t) => {
                let j = crate::channel::choi_from_kraus(t)?;
                Some(r.choi.matrix().sub(j.matrix())?.as_complex().frobenius())
            }
            None => None,
        };
        let doc = with_header(
            "reconstruct",
            a,
            json!({
                "choi": io::choi_value(&r.choi),
                "residual": r.residual,
                "iterations": r.iterations,
                "converged": r.converged,
                "choi_error": error,
            }),
        );
        emit(a.out.as_deref(), &doc)?;
        eprintln!("residual {:e} after {} iterations", r.residual, r.iterations);
        let ok = r.converged && error.is_none_or(|e| e <= Tolerances::default().choi_error);
        Ok(if ok { 0 } else { 1 })
    }
}

fn experiment(a: &ExperimentArgs) -> CliResult<i32> {
    let mut config = match &a.input {
        Some(p) => {
            let v = io::read_value(p)?;
            serde_json::from_value::<ExperimentConfig>(v)
                .map_err(|e| Error::Schema { path: p.display().to_string(), message: e.to_string() })?
        }
        None => {
            let missing = |f: &str| usage(format!("--{f} is required"));
            ExperimentConfig::new(
                a.d.ok_or_else(|| missing("d"))?,
                a.q,
                a.question.ok_or_else(|| missing("question"))?,
                a.trials.ok_or_else(|| missing("trials"))?,
                a.seed.ok_or_else(|| missing("seed"))?,
            )
        }
    };
    if a.input.is_none() {
        config.task = if a.task == "reconstruct" { Task::Reconstruct } else { Task::Discriminate };
    }
    if a.shots.is_some() {
        config.shots = a.shots;
    }
    if a.restarts.is_some() {
        config.restarts = a.restarts;
    }
    if let Some(t) = a.tol {
        config.tolerances.discrimination = t;
    }
    let report = run_experiment(&config)?;
    let doc = serde_json::to_value(&report).map_err(Error::from)?;
    let mut doc = doc;
    doc.as_object_mut().expect("object").insert("command".into(), json!("experiment"));
    emit(a.out.as_deref(), &doc)?;
    if let Some(p) = &a.csv {
        std::fs::write(p, report.to_csv()).map_err(Error::from)?;
    }
    eprintln!(
        "{}/{} trials succeeded ({} observables) in {:.3} s",
        report.successes, report.trials, report.observable_count, report.wall_clock_seconds
    );
    Ok(0)
}
