//! Seeded multi-run experiments.
//!
//! An [`ExperimentConfig`] names a problem, a list of algorithms and a
//! number of runs `R`. Every run gets the seed
//! `derive_seed(master, [label_of(name), run])`, so adding an algorithm never
//! changes the runs of another one. Runs execute in parallel and are
//! gathered back in run order before aggregation.
//!
//! Each run records `‖∇f‖²` at the epoch grid `1..=epochs` (one epoch is
//! `n` IFO calls). A Prob-SARAH run that stops early contributes
//! `‖∇f(x̂)‖²` at all later epochs. The level-`p` quantile over runs is the
//! order statistic of rank `⌈p·R⌉` in ascending order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::concentration::OmegaMonitor;
use crate::data::{read_libsvm, ParseOptions};
use crate::linalg::norm_sq;
use crate::objective::{FiniteSum, LogisticRegression, ProblemConstants, QuadraticObjective, Regularizer};
use crate::optimizer::{prob_sarah_observed, scsg, sgd, svrg, BaselineConfig, RunConfig, RunTrace, StepSize};
use crate::rng::{derive_seed, label_of, stream};
use crate::schedule::{schedule, schedule_csv, ScheduleInputs, Setting};
use crate::{Error, Result};

pub const QUANTILE_CSV_HEADER: &str = "algorithm,epoch,quantile_level,grad_norm_sq";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Regularized logistic regression on a LIBSVM file. Relative paths are
    /// resolved against the config file's directory.
    Libsvm {
        path: PathBuf,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        regularizer: Regularizer,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        dim: Option<usize>,
    },
    /// `(μ/2)‖x − a_i‖² + λ·Φ(x)` with random centres, see
    /// [`QuadraticObjective::random`].
    Quadratic {
        n: usize,
        dim: usize,
        offset: f64,
        spread: f64,
        curvature: f64,
        lambda: f64,
        radius: f64,
        seed: u64,
    },
}

impl ProblemSpec {
    /// The synthetic non-convex benchmark: `n = 500`, `d = 10`, with the
    /// penalty weight above `4μ` so the rational-square term makes the
    /// sum non-convex near the origin.
    pub fn nonconvex_quadratic(seed: u64) -> Self {
        ProblemSpec::Quadratic {
            n: 500,
            dim: 10,
            offset: 2.0,
            spread: 2.0,
            curvature: 0.5,
            lambda: 3.0,
            radius: 10.0,
            seed,
        }
    }
}

fn default_lambda() -> f64 {
    0.1
}

fn default_radius() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    ProbSarah {
        #[serde(default)]
        name: Option<String>,
        setting: Setting,
        /// Fixed step size; `1/(4L)` when absent.
        #[serde(default)]
        step: Option<f64>,
        #[serde(default)]
        continue_after_stop: bool,
        /// Run the estimator-error monitor (one full gradient per step).
        #[serde(default)]
        monitor: bool,
    },
    Sgd {
        #[serde(default)]
        name: Option<String>,
        step: f64,
        /// Minibatch size; [`baseline_matching`] when absent.
        #[serde(default)]
        batch: Option<usize>,
    },
    Svrg {
        #[serde(default)]
        name: Option<String>,
        step: f64,
        #[serde(default)]
        batch: Option<usize>,
        /// Inner steps per checkpoint; `⌈n/b⌉` when absent.
        #[serde(default)]
        inner_len: Option<usize>,
    },
    Scsg {
        #[serde(default)]
        name: Option<String>,
        step: f64,
        #[serde(default)]
        batch: Option<usize>,
        /// Checkpoint batch; `min(n, 8b)` when absent.
        #[serde(default)]
        big_batch: Option<usize>,
    },
}

impl AlgorithmSpec {
    pub fn name(&self) -> String {
        match self {
            AlgorithmSpec::ProbSarah { name, setting, .. } => name.clone().unwrap_or_else(|| {
                let s = match setting {
                    Setting::A => "a",
                    Setting::B => "b",
                    Setting::Practical => "practical",
                };
                format!("prob_sarah_{s}")
            }),
            AlgorithmSpec::Sgd { name, .. } => name.clone().unwrap_or_else(|| "sgd".into()),
            AlgorithmSpec::Svrg { name, .. } => name.clone().unwrap_or_else(|| "svrg".into()),
            AlgorithmSpec::Scsg { name, .. } => name.clone().unwrap_or_else(|| "scsg".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Levels `1 − δ` at which quantile trajectories are reported.
    #[serde(default = "default_levels")]
    pub quantile_levels: Vec<f64>,
    pub epochs: u32,
    /// Master seed; 0 when absent everywhere.
    #[serde(default)]
    pub seed: Option<u64>,
    pub eps: f64,
    pub delta: f64,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_runs() -> usize {
    100
}

fn default_levels() -> Vec<f64> {
    vec![0.9]
}

/// Command-line style overrides, applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Used only when neither the flag nor the config file sets a seed.
    pub fallback_seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub runs: Option<usize>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub setting: Option<Setting>,
    pub normalize: Option<bool>,
}

impl ExperimentConfig {
    /// Reads a JSON config. Relative dataset paths are resolved against the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if let ProblemSpec::Libsvm { path: data, .. } = &mut cfg.problem {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if self.seed.is_none() {
            self.seed = o.fallback_seed;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = Some(d.clone());
        }
        if let Some(r) = o.runs {
            self.runs = r;
        }
        if let Some(e) = o.eps {
            self.eps = e;
        }
        if let Some(d) = o.delta {
            self.delta = d;
        }
        if let Some(n) = o.normalize {
            self.normalize = n;
        }
        if let Some(s) = o.setting {
            for a in &mut self.algorithms {
                if let AlgorithmSpec::ProbSarah { setting, .. } = a {
                    *setting = s;
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        if self.quantile_levels.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::config("quantile levels must lie in (0, 1]"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::config(format!("eps must be positive, got {}", self.eps)));
        }
        let mut names: Vec<String> = self.algorithms.iter().map(AlgorithmSpec::name).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config(format!("duplicate algorithm name {:?}", w[0])));
        }
        Ok(())
    }
}

/// The objective of an experiment together with its provenance.
pub struct Problem {
    pub objective: Box<dyn FiniteSum>,
    /// Exact `Δ_f` bound when known in closed form.
    pub delta_f_bound: Option<f64>,
    /// Bytes identifying the inputs (dataset file or synthetic descriptor).
    pub input_bytes: Vec<u8>,
}

pub fn build_problem(spec: &ProblemSpec, normalize: bool) -> Result<Problem> {
    match spec {
        ProblemSpec::Libsvm {
            path,
            lambda,
            regularizer,
            radius,
            dim,
        } => {
            let bytes = std::fs::read(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let mut ds = read_libsvm(path, ParseOptions { dim: *dim })?;
            if normalize {
                ds = ds.normalize_rows();
            }
            let obj = LogisticRegression::new(Arc::new(ds), *lambda, *regularizer, *radius)?;
            Ok(Problem {
                objective: Box::new(obj),
                delta_f_bound: None,
                input_bytes: bytes,
            })
        }
        ProblemSpec::Quadratic {
            n,
            dim,
            offset,
            spread,
            curvature,
            lambda,
            radius,
            seed,
        } => {
            let mut rng = stream(*seed);
            let obj = QuadraticObjective::random(*n, *dim, *offset, *spread, *curvature, *lambda, *radius, &mut rng)?;
            let input_bytes = serde_json::to_vec(spec).expect("problem spec serializes");
            Ok(Problem {
                delta_f_bound: Some(obj.delta_f_bound()),
                objective: Box::new(obj),
                input_bytes,
            })
        }
    }
}

/// Rank-`⌈level·R⌉` order statistic (ascending) of `values`.
pub fn quantile(values: &[f64], level: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((level * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// Nearest power of two by absolute distance (ties go down), at least 1.
pub fn nearest_power_of_two(x: f64) -> usize {
    if !(x > 1.0) {
        return 1;
    }
    let lo = 1usize << (x.log2().floor() as u32);
    let hi = lo * 2;
    if x - lo as f64 <= hi as f64 - x {
        lo
    } else {
        hi
    }
}

/// Baseline batch size: the Prob-SARAH inner batch `b_j` of the outer
/// iteration running at the midpoint epoch `epochs/2`, rounded to the
/// nearest power of two.
pub fn baseline_matching(inputs: &ScheduleInputs, epochs: u32, setting: Setting) -> Result<usize> {
    if epochs == 0 {
        return Err(Error::config("epochs must be at least 1"));
    }
    let target = epochs as f64 * inputs.n as f64 / 2.0;
    let mut ifo = 0.0;
    let mut j = 1;
    loop {
        let p = schedule(setting, j, inputs)?;
        ifo += p.ifo_cost() as f64;
        if ifo >= target {
            return Ok(nearest_power_of_two(p.mini_batch as f64));
        }
        j += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub epoch: u32,
    pub level: f64,
    pub grad_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub name: String,
    pub spec: AlgorithmSpec,
    pub runs: usize,
    pub stopped: usize,
    /// Runs that stopped with `‖∇f(x̂)‖² ≤ ε²`; unstopped runs count as
    /// failures.
    pub successes: usize,
    pub success_frequency: f64,
    /// Fraction of runs whose final iterate has `‖∇f‖² ≤ ε²`, stopped or
    /// not. The only success notion available to the baselines.
    pub final_below_eps_frequency: f64,
    /// Runs with at least one estimator-error bound violation, when
    /// monitored.
    pub omega_violation_runs: Option<usize>,
    pub ifo_per_run: Vec<u64>,
    pub stop_outer_per_run: Vec<Option<usize>>,
    pub trajectory: Vec<QuantileRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub n: usize,
    pub dim: usize,
    pub constants: ProblemConstants,
    /// Closed-form bound when available, else `2(f(x̃₀) − min observed f)`.
    pub delta_f_estimate: f64,
    /// sha256 of the schedule tables used, per Prob-SARAH algorithm.
    pub schedule_hashes: BTreeMap<String, String>,
    /// sha256 of `"blob <len>\0" ‖ input`.
    pub input_hash: String,
    pub quantile_convention: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileReport {
    pub algorithms: Vec<AlgorithmSummary>,
    pub manifest: Manifest,
}

struct RunOutcome {
    trajectory: Vec<f64>,
    stop_outer: Option<usize>,
    stop_grad_sq: Option<f64>,
    final_grad_sq: f64,
    ifo: u64,
    omega_violation: Option<bool>,
    min_loss: f64,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Git-style content hash: sha256 over `"blob <len>\0"` followed by the
/// content.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex(&h.finalize())
}

/// Per-epoch values `1..=epochs`, padded with `fill` past the end of the
/// snapshots.
fn epoch_values(trace: &RunTrace, epochs: u32, fill: f64) -> Vec<f64> {
    (1..=epochs)
        .map(|e| {
            trace
                .snapshots
                .iter()
                .find(|s| s.epoch == e)
                .map(|s| s.grad_sq)
                .unwrap_or(fill)
        })
        .collect()
}

fn run_one(
    f: &dyn FiniteSum,
    cfg: &ExperimentConfig,
    spec: &AlgorithmSpec,
    matched: usize,
    seed: u64,
    delta_f: Option<f64>,
) -> Result<RunOutcome> {
    let n = f.n_samples();
    let base = |step: f64, b: Option<usize>| BaselineConfig {
        step,
        batch: b.unwrap_or(matched),
        epochs: cfg.epochs as f64,
        seed,
        x0: None,
        snapshots: true,
    };
    let mut omega = None;
    let trace = match spec {
        AlgorithmSpec::ProbSarah {
            setting,
            step,
            continue_after_stop,
            monitor,
            ..
        } => {
            let mut rc = RunConfig::new(*setting, cfg.eps, cfg.delta, seed);
            rc.epoch_budget = Some(cfg.epochs as f64);
            rc.snapshots = true;
            rc.continue_after_stop = *continue_after_stop;
            rc.delta_f = delta_f;
            if let Some(s) = step {
                rc.step = StepSize::Fixed(*s);
            }
            if *monitor {
                let mut m = OmegaMonitor::new(f);
                let t = prob_sarah_observed(f, &rc, &mut m)?;
                omega = Some(m.report().any_violation());
                t
            } else {
                prob_sarah_observed(f, &rc, &mut ())?
            }
        }
        AlgorithmSpec::Sgd { step, batch, .. } => sgd(f, &base(*step, *batch))?,
        AlgorithmSpec::Svrg {
            step, batch, inner_len, ..
        } => svrg(f, &base(*step, *batch), *inner_len)?,
        AlgorithmSpec::Scsg {
            step, batch, big_batch, ..
        } => {
            let b = batch.unwrap_or(matched);
            scsg(f, &base(*step, Some(b)), big_batch.unwrap_or((8 * b).min(n)))?
        }
    };
    let final_grad_sq = norm_sq(&f.full_gradient(&trace.final_x));
    let stop_grad_sq = trace.stop.as_ref().map(|s| s.grad_sq);
    let fill = stop_grad_sq
        .filter(|_| !trace.snapshots.iter().any(|s| s.epoch >= cfg.epochs))
        .or_else(|| trace.snapshots.last().map(|s| s.grad_sq))
        .unwrap_or(final_grad_sq);
    let mut min_loss = f.loss(&trace.final_x);
    if let Some(s) = &trace.stop {
        min_loss = min_loss.min(f.loss(&s.x_hat));
    }
    Ok(RunOutcome {
        trajectory: epoch_values(&trace, cfg.epochs, fill),
        stop_outer: trace.stop.as_ref().map(|s| s.outer),
        stop_grad_sq,
        final_grad_sq,
        ifo: trace.ifo,
        omega_violation: omega,
        min_loss,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<QuantileReport> {
    cfg.validate()?;
    let problem = build_problem(&cfg.problem, cfg.normalize)?;
    run_experiment_on(cfg, &problem)
}

/// As [`run_experiment`] with an already built problem.
pub fn run_experiment_on(cfg: &ExperimentConfig, problem: &Problem) -> Result<QuantileReport> {
    cfg.validate()?;
    let f: &dyn FiniteSum = problem.objective.as_ref();
    let n = f.n_samples();
    let constants = f.constants();
    let inputs = ScheduleInputs::new(n, cfg.eps, cfg.delta, &constants);
    let matched = baseline_matching(&inputs, cfg.epochs, Setting::Practical)?;
    let eps_sq = cfg.eps * cfg.eps;
    let x0 = vec![0.0; f.dim()];
    let f0 = f.loss(&x0);

    let mut summaries = Vec::new();
    let mut schedule_hashes = BTreeMap::new();
    let mut min_loss = f0;
    let master = cfg.seed.unwrap_or(0);
    for spec in &cfg.algorithms {
        let name = spec.name();
        let label = label_of(&name);
        let outcomes: Vec<RunOutcome> = (0..cfg.runs as u64)
            .into_par_iter()
            .map(|r| {
                run_one(
                    f,
                    cfg,
                    spec,
                    matched,
                    derive_seed(master, &[label, r]),
                    problem.delta_f_bound,
                )
            })
            .collect::<Result<_>>()?;

        if let AlgorithmSpec::ProbSarah { setting, .. } = spec {
            let j_max = outcomes.iter().filter_map(|o| o.stop_outer).max().unwrap_or(1).max(1);
            let table = schedule_csv(*setting, &inputs, j_max)?;
            schedule_hashes.insert(name.clone(), hex(&Sha256::digest(table.as_bytes())));
        }

        let runs = outcomes.len();
        let stopped = outcomes.iter().filter(|o| o.stop_outer.is_some()).count();
        let successes = outcomes
            .iter()
            .filter(|o| o.stop_grad_sq.is_some_and(|g| g <= eps_sq))
            .count();
        let below = outcomes.iter().filter(|o| o.final_grad_sq <= eps_sq).count();
        let omega_violation_runs = matches!(spec, AlgorithmSpec::ProbSarah { monitor: true, .. })
            .then(|| outcomes.iter().filter(|o| o.omega_violation == Some(true)).count());
        min_loss = outcomes.iter().map(|o| o.min_loss).fold(min_loss, f64::min);

        let mut trajectory = Vec::new();
        for e in 0..cfg.epochs as usize {
            let column: Vec<f64> = outcomes.iter().map(|o| o.trajectory[e]).collect();
            for &level in &cfg.quantile_levels {
                trajectory.push(QuantileRow {
                    epoch: e as u32 + 1,
                    level,
                    grad_norm_sq: quantile(&column, level),
                });
            }
        }
        summaries.push(AlgorithmSummary {
            name,
            spec: spec.clone(),
            runs,
            stopped,
            successes,
            success_frequency: successes as f64 / runs as f64,
            final_below_eps_frequency: below as f64 / runs as f64,
            omega_violation_runs,
            ifo_per_run: outcomes.iter().map(|o| o.ifo).collect(),
            stop_outer_per_run: outcomes.iter().map(|o| o.stop_outer).collect(),
            trajectory,
        });
    }

    Ok(QuantileReport {
        algorithms: summaries,
        manifest: Manifest {
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            n,
            dim: f.dim(),
            constants,
            delta_f_estimate: problem.delta_f_bound.unwrap_or(2.0 * (f0 - min_loss)),
            schedule_hashes,
            input_hash: blob_hash(&problem.input_bytes),
            quantile_convention: "order statistic of rank ceil(level * runs), ascending".into(),
        },
    })
}

pub fn quantiles_csv(report: &QuantileReport) -> String {
    let mut s = String::from(QUANTILE_CSV_HEADER);
    s.push('\n');
    for a in &report.algorithms {
        for row in &a.trajectory {
            let _ = writeln!(s, "{},{},{},{}", a.name, row.epoch, row.level, row.grad_norm_sq);
        }
    }
    s
}

/// Writes `quantiles.csv` and `summary.json` into `dir`.
pub fn emit_csv(report: &QuantileReport, dir: &Path) -> Result<()> {
    let io = |path: PathBuf| move |source| Error::Io { path, source };
    std::fs::create_dir_all(dir).map_err(io(dir.to_path_buf()))?;
    let csv = dir.join("quantiles.csv");
    std::fs::write(&csv, quantiles_csv(report)).map_err(io(csv.clone()))?;
    let json = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    std::fs::write(&json, text).map_err(io(json.clone()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_cfg(algorithms: Vec<AlgorithmSpec>, runs: usize, epochs: u32) -> ExperimentConfig {
        ExperimentConfig {
            problem: ProblemSpec::Quadratic {
                n: 40,
                dim: 4,
                offset: 1.0,
                spread: 1.0,
                curvature: 1.0,
                lambda: 0.5,
                radius: 5.0,
                seed: 3,
            },
            algorithms,
            runs,
            quantile_levels: vec![0.9, 0.99],
            epochs,
            seed: Some(11),
            eps: 0.3,
            delta: 0.1,
            normalize: false,
            output_dir: None,
        }
    }

    fn sgd_spec() -> AlgorithmSpec {
        AlgorithmSpec::Sgd {
            name: None,
            step: 0.1,
            batch: Some(4),
        }
    }

    #[test]
    fn quantile_ranks() {
        let v = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(quantile(&v, 0.9), 5.0);
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.2), 1.0);
        assert_eq!(quantile(&[7.0], 0.1), 7.0);
    }

    #[test]
    fn power_of_two_rounding() {
        assert_eq!(nearest_power_of_two(281.0), 256);
        assert_eq!(nearest_power_of_two(400.0), 512);
        assert_eq!(nearest_power_of_two(1.4), 1);
        assert_eq!(nearest_power_of_two(0.3), 1);
        assert_eq!(nearest_power_of_two(3.0), 2);
    }

    #[test]
    fn matching_rule() {
        let c = ProblemConstants {
            lipschitz: 0.35,
            alpha_m: 1.0,
            radius: 50.0,
        };
        let w7a = ScheduleInputs::new(24_692, 0.1, 0.1, &c);
        assert_eq!(baseline_matching(&w7a, 60, Setting::Practical).unwrap(), 256);
        let tiny = ScheduleInputs::new(1, 0.1, 0.1, &c);
        assert_eq!(baseline_matching(&tiny, 1, Setting::Practical).unwrap(), 1);
    }

    #[test]
    fn single_run_quantiles_equal_the_run() {
        let cfg = quad_cfg(vec![sgd_spec()], 1, 3);
        let rep = run_experiment(&cfg).unwrap();
        let t = &rep.algorithms[0].trajectory;
        assert_eq!(t.len(), 6);
        for e in 0..3 {
            assert_eq!(t[2 * e].grad_norm_sq, t[2 * e + 1].grad_norm_sq);
        }
    }

    #[test]
    fn higher_levels_dominate() {
        let cfg = quad_cfg(
            vec![
                sgd_spec(),
                AlgorithmSpec::ProbSarah {
                    name: None,
                    setting: Setting::A,
                    step: None,
                    continue_after_stop: false,
                    monitor: false,
                },
            ],
            12,
            3,
        );
        let rep = run_experiment(&cfg).unwrap();
        for a in &rep.algorithms {
            for pair in a.trajectory.chunks(2) {
                assert!(pair[1].grad_norm_sq >= pair[0].grad_norm_sq);
            }
        }
        assert_eq!(quantiles_csv(&rep).lines().count(), 1 + 12);
    }

    #[test]
    fn empty_algorithm_list_gives_header_only() {
        let rep = run_experiment(&quad_cfg(vec![], 2, 2)).unwrap();
        assert_eq!(quantiles_csv(&rep), format!("{QUANTILE_CSV_HEADER}\n"));
    }

    #[test]
    fn emitted_files_are_reproducible() {
        let cfg = quad_cfg(vec![sgd_spec()], 3, 2);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_csv(&run_experiment(&cfg).unwrap(), a.path()).unwrap();
        emit_csv(&run_experiment(&cfg).unwrap(), b.path()).unwrap();
        for file in ["quantiles.csv", "summary.json"] {
            assert_eq!(
                std::fs::read(a.path().join(file)).unwrap(),
                std::fs::read(b.path().join(file)).unwrap()
            );
        }
    }

    #[test]
    fn config_rejects_unknown_keys_and_applies_overrides() {
        let text = r#"{"problem":{"kind":"quadratic","n":5,"dim":2,"offset":0,"spread":1,"curvature":1,"lambda":0,"radius":2,"seed":1},
                       "algorithms":[{"kind":"prob_sarah","setting":"A"}],"epochs":2,"eps":0.3,"delta":0.1,"bogus":1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
        let text = text.replace(r#","bogus":1"#, "");
        let mut cfg: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg.runs, 100);
        cfg.apply(&Overrides {
            seed: Some(9),
            runs: Some(2),
            setting: Some(Setting::B),
            ..Overrides::default()
        });
        assert_eq!((cfg.seed, cfg.runs), (Some(9), 2));
        assert!(matches!(
            cfg.algorithms[0],
            AlgorithmSpec::ProbSarah {
                setting: Setting::B,
                ..
            }
        ));
    }

    #[test]
    fn blob_hash_matches_git() {
        // `printf 'hello\n' | git hash-object --object-format=sha256 --stdin`
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }
}
