//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//!     cargo test --release --test acceptance

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use prob_sarah::bounds::stop_bounds_a;
use prob_sarah::concentration::{
    validate_mah, validate_norm_hoeffding, MartingaleFamily, MartingaleTrialConfig, OmegaMonitor, ViolationReport,
};
use prob_sarah::data::{read_libsvm, Dataset, ParseOptions};
use prob_sarah::harness::{
    build_problem, emit_csv, run_experiment, ExperimentConfig, Overrides, ProblemSpec, QUANTILE_CSV_HEADER,
};
use prob_sarah::objective::{uniform_in_ball, FiniteSum, LogisticRegression, QuadraticObjective, Regularizer};
use prob_sarah::optimizer::{prob_sarah_observed, RunConfig, RunTrace, StepObserver, StepView};
use prob_sarah::rng::{derive_seed, label_of, stream};
use prob_sarah::schedule::{schedule_a, ScheduleInputs, Setting};

const MASTER_SEED: u64 = 1;
const EPS: f64 = 0.3;
const DELTA: f64 = 0.1;
const RUNS: u64 = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

// ---------------------------------------------------------------- 1, 2, 5

struct BenchmarkRun {
    trace: RunTrace,
    omega_violation: bool,
    line11: Result<(), String>,
}

/// Recomputes the stopping-rule quantities of every outer iteration from the
/// step log and the schedule, and checks them against what the run logged.
fn check_line11(f: &dyn FiniteSum, trace: &RunTrace, inputs: &ScheduleInputs) -> Result<(), String> {
    let stop = trace.stop.as_ref().ok_or("run did not stop")?;
    let eps_sq = EPS * EPS;
    for o in &trace.outers {
        let p = schedule_a(o.j, inputs).map_err(|e| e.to_string())?;
        if (o.eps_j, o.eps_tilde_sq, o.inner_len) != (p.eps_j, p.eps_tilde_sq, p.inner_len) {
            return Err(format!("outer {}: logged schedule differs", o.j));
        }
        let inner: Vec<f64> = trace
            .steps
            .iter()
            .filter(|s| s.j == o.j && s.k < o.inner_len)
            .map(|s| s.nu_sq)
            .collect();
        if inner.len() != o.inner_len {
            return Err(format!(
                "outer {}: {} logged steps, expected {}",
                o.j,
                inner.len(),
                o.inner_len
            ));
        }
        let avg = inner.iter().fold(0.0, |acc, v| acc + v) / o.inner_len as f64;
        if avg != o.avg_nu_sq {
            return Err(format!("outer {}: average {avg:e} vs logged {:e}", o.j, o.avg_nu_sq));
        }
        let first = avg <= p.eps_tilde_sq;
        let second = p.eps_j <= eps_sq / 2.0;
        if (first, second) != (o.first_rule, o.second_rule) {
            return Err(format!("outer {}: rule flags disagree", o.j));
        }
        let fires = first && second;
        if fires != (o.j == stop.outer) {
            return Err(format!("outer {}: rules fire = {fires}, stop at {}", o.j, stop.outer));
        }
        if o.j == stop.outer {
            let min = inner.iter().cloned().fold(f64::INFINITY, f64::min);
            if inner.iter().position(|&v| v == min) != Some(stop.k_hat) {
                return Err(format!("outer {}: k_hat {} is not the first argmin", o.j, stop.k_hat));
            }
            let g = f.full_gradient(&stop.x_hat);
            let g_sq: f64 = g.iter().map(|v| v * v).sum();
            if g_sq != stop.grad_sq {
                return Err("logged |grad f(x_hat)|^2 differs from recomputation".into());
            }
        }
    }
    if trace.outers.last().map(|o| o.j) != Some(stop.outer) {
        return Err("iterations continued past the stop".into());
    }
    Ok(())
}

fn benchmark_runs() -> (Vec<BenchmarkRun>, u64, f64) {
    let problem = build_problem(&ProblemSpec::nonconvex_quadratic(MASTER_SEED), false).unwrap();
    let f = problem.objective.as_ref();
    let c = f.constants();
    let delta_f = problem.delta_f_bound.unwrap();
    let inputs = ScheduleInputs {
        n: f.n_samples(),
        eps: EPS,
        delta: DELTA,
        lipschitz: c.lipschitz,
        alpha_m: c.alpha_m,
        diameter: c.diameter(),
    };
    let cap = stop_bounds_a(EPS, DELTA, f.n_samples(), c.lipschitz, delta_f, c.alpha_m)
        .unwrap()
        .outer_cap;
    let start = Instant::now();
    let runs = (0..RUNS)
        .into_par_iter()
        .map(|r| {
            let mut cfg = RunConfig::new(
                Setting::A,
                EPS,
                DELTA,
                derive_seed(MASTER_SEED, &[label_of("prob_sarah_a"), r]),
            );
            cfg.delta_f = Some(delta_f);
            let mut monitor = OmegaMonitor::new(f);
            let trace = prob_sarah_observed(f, &cfg, &mut monitor).unwrap();
            let omega_violation = monitor.into_report().any_violation();
            let line11 = check_line11(f, &trace, &inputs);
            BenchmarkRun {
                trace,
                omega_violation,
                line11,
            }
        })
        .collect();
    (runs, cap, start.elapsed().as_secs_f64())
}

fn criterion_1(runs: &[BenchmarkRun], secs: f64) -> Outcome {
    let success = runs
        .iter()
        .filter(|r| r.trace.stop.as_ref().is_some_and(|s| s.grad_sq <= EPS * EPS))
        .count();
    let freq = success as f64 / runs.len() as f64;
    let bad: Vec<String> = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.trace.stopped())
        .filter_map(|(i, r)| r.line11.as_ref().err().map(|e| format!("run {i}: {e}")))
        .collect();
    outcome(
        freq >= 0.9 && bad.is_empty() && secs <= 120.0,
        format!(
            "success {success}/{} = {freq:.2} (need >= 0.90), stopping-rule log mismatches {}, {secs:.1}s{}",
            runs.len(),
            bad.len(),
            bad.first().map(|b| format!(" [{b}]")).unwrap_or_default()
        ),
    )
}

fn criterion_2(runs: &[BenchmarkRun], cap: u64) -> Outcome {
    let outers: Vec<u64> = runs
        .iter()
        .filter_map(|r| r.trace.stop.as_ref())
        .map(|s| s.outer as u64)
        .collect();
    let unstopped = runs.len() - outers.len();
    let violations = outers.iter().filter(|&&o| o > cap).count() + unstopped;
    let max = outers.iter().max().copied().unwrap_or(0);
    outcome(
        violations == 0,
        format!("largest stopping outer iteration {max} vs outer_cap {cap}, violations {violations} (unstopped {unstopped})"),
    )
}

fn criterion_5(runs: &[BenchmarkRun]) -> Outcome {
    let violated = runs.iter().filter(|r| r.omega_violation).count();
    let frac = violated as f64 / runs.len() as f64;
    outcome(
        frac <= DELTA,
        format!(
            "runs with an estimator-error violation {violated}/{} = {frac:.2} (need <= {DELTA})",
            runs.len()
        ),
    )
}

// ---------------------------------------------------------------------- 3

fn mah(dim: usize) -> ViolationReport {
    validate_mah(&MartingaleTrialConfig {
        dim,
        len: 100,
        family: MartingaleFamily::UniformSphere,
        radius: 1.0,
        delta: 0.05,
        big_b: 101.0,
        small_b: 1.0,
        trials: 100_000,
        seed: derive_seed(MASTER_SEED, &[label_of("mah"), dim as u64]),
    })
    .unwrap()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let sweep: Vec<(usize, ViolationReport)> = [2, 20, 200].into_iter().map(|d| (d, mah(d))).collect();
    let secs = start.elapsed().as_secs_f64();
    let main = &sweep[1].1;
    // a larger dimension may not show a higher frequency unless the
    // intervals overlap
    let mut no_increase = true;
    for (i, (_, lo)) in sweep.iter().enumerate() {
        for (_, hi) in &sweep[i + 1..] {
            if hi.frequency > lo.frequency && !hi.overlaps(lo) {
                no_increase = false;
            }
        }
    }
    let freqs: Vec<String> = sweep.iter().map(|(d, r)| format!("d={d}: {}", r.summary())).collect();
    outcome(
        main.wilson_upper <= 0.05 && no_increase && secs <= 60.0,
        format!(
            "d=20 Wilson upper {:.4} (need <= 0.05); sweep without systematic increase: {no_increase}; {}; {secs:.1}s",
            main.wilson_upper,
            freqs.join("; ")
        ),
    )
}

// ---------------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let mut rng = stream(derive_seed(MASTER_SEED, &[label_of("norm_hoeffding_vectors")]));
    let vectors: Vec<Vec<f64>> = (0..200).map(|_| uniform_in_ball(10, 1.0, &mut rng)).collect();
    let k = 20;
    let t_grid = [1.9, 1.95, 2.0];
    let report = validate_norm_hoeffding(
        &vectors,
        1.0,
        k,
        &t_grid,
        100_000,
        derive_seed(MASTER_SEED, &[label_of("norm_hoeffding")]),
    )
    .unwrap();
    let nontrivial = report.thresholds.iter().all(|t| t.bound < 1.0);
    let tails_ok = report.thresholds.iter().all(|t| t.report.frequency <= t.bound);
    let mean_ok = report.mean_sq <= report.mean_sq_bound;
    let tails: Vec<String> = report
        .thresholds
        .iter()
        .map(|t| format!("t={}: {:.2e} <= {:.3e}", t.t, t.report.frequency, t.bound))
        .collect();
    outcome(
        nontrivial && tails_ok && mean_ok,
        format!(
            "{}; E|mean dev|^2 {:.4e} <= 16/k = {:.4e}",
            tails.join(", "),
            report.mean_sq,
            report.mean_sq_bound
        ),
    )
}

// ---------------------------------------------------------------------- 6

/// Largest `‖ν_k − ∇f(x_k)‖ / max(1, ‖∇f(x_k)‖)` seen.
struct ExactnessProbe<'a> {
    f: &'a dyn FiniteSum,
    worst: f64,
    steps: usize,
}

impl StepObserver for ExactnessProbe<'_> {
    fn on_step(&mut self, v: &StepView<'_>) {
        let g = self.f.full_gradient(v.x);
        let err: f64 = g.iter().zip(v.nu).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = g.iter().map(|a| a * a).sum::<f64>().sqrt().max(1.0);
        self.worst = self.worst.max(err / scale);
        self.steps += 1;
    }
}

fn exactness(f: &dyn FiniteSum, debug_full_batch: bool, seed: u64) -> (f64, usize) {
    let mut cfg = RunConfig::new(Setting::A, EPS, DELTA, seed);
    cfg.max_outer = Some(30);
    cfg.continue_after_stop = true;
    cfg.debug_full_batch = debug_full_batch;
    cfg.x0 = Some(vec![0.5; f.dim()]);
    let mut probe = ExactnessProbe {
        f,
        worst: 0.0,
        steps: 0,
    };
    prob_sarah_observed(f, &cfg, &mut probe).unwrap();
    (probe.worst, probe.steps)
}

fn central_difference(f: &dyn FiniteSum, i: usize, x: &[f64]) -> Vec<f64> {
    let h = 1e-6 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|c| {
            xp[c] = x[c] + h;
            let up = f.sample_loss(i, &xp);
            xp[c] = x[c] - h;
            let down = f.sample_loss(i, &xp);
            xp[c] = x[c];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Point in the ball of radius `r` with every coordinate at least `floor`
/// away from zero.
fn away_from_axes<R: Rng>(dim: usize, r: f64, floor: f64, rng: &mut R) -> Vec<f64> {
    let mut x = uniform_in_ball(dim, r, rng);
    for v in &mut x {
        if v.abs() < floor {
            *v = if *v < 0.0 { -floor } else { floor };
        }
    }
    x
}

fn criterion_6() -> Outcome {
    let mut worst_exact: f64 = 0.0;
    let mut steps = 0;

    // n = 1: a quadratic and a single logistic sample
    let single_quad = QuadraticObjective::new(
        vec![vec![1.5, -0.5, 2.0, 0.25]],
        0.5,
        3.0,
        Regularizer::RationalSquare,
        10.0,
    )
    .unwrap();
    let single_row = Dataset::from_rows(4, &[vec![(0, 1.0), (2, -0.5), (3, 2.0)]], &[1.0]).unwrap();
    let single_logit = LogisticRegression::new(Arc::new(single_row), 0.1, Regularizer::RationalSquare, 10.0).unwrap();
    for (k, f) in [&single_quad as &dyn FiniteSum, &single_logit].into_iter().enumerate() {
        let (w, s) = exactness(f, false, derive_seed(MASTER_SEED, &[label_of("n1"), k as u64]));
        worst_exact = worst_exact.max(w);
        steps += s;
    }

    // debug full-batch mode on the benchmark and on mushrooms
    let quad = build_problem(&ProblemSpec::nonconvex_quadratic(MASTER_SEED), false).unwrap();
    let mushrooms =
        Arc::new(read_libsvm(&manifest_dir().join("data/mushrooms.libsvm"), ParseOptions::default()).unwrap());
    let logit = LogisticRegression::new(mushrooms.clone(), 0.1, Regularizer::RationalSquare, 50.0).unwrap();
    for (k, f) in [quad.objective.as_ref(), &logit as &dyn FiniteSum]
        .into_iter()
        .enumerate()
    {
        let (w, s) = exactness(f, true, derive_seed(MASTER_SEED, &[label_of("full_batch"), k as u64]));
        worst_exact = worst_exact.max(w);
        steps += s;
    }

    // finite differences: 1000 random (i, x) over three objectives
    let fourth = LogisticRegression::new(mushrooms, 0.1, Regularizer::fourth_root(), 50.0).unwrap();
    let objectives: [(&dyn FiniteSum, bool, usize); 3] = [
        (&logit, false, 400),
        (&fourth, true, 300),
        (quad.objective.as_ref(), false, 300),
    ];
    let mut rng = stream(derive_seed(MASTER_SEED, &[label_of("finite_differences")]));
    let mut worst_fd: f64 = 0.0;
    let mut checks = 0;
    for (f, avoid_zero, count) in objectives {
        for _ in 0..count {
            let i = rng.random_range(0..f.n_samples());
            let x = if avoid_zero {
                away_from_axes(f.dim(), 5.0, 0.05, &mut rng)
            } else {
                uniform_in_ball(f.dim(), 5.0, &mut rng)
            };
            let mut g = vec![0.0; f.dim()];
            f.add_sample_gradient(i, &x, 1.0, &mut g);
            let fd = central_difference(f, i, &x);
            let err = g.iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
            worst_fd = worst_fd.max(err / norm);
            checks += 1;
        }
    }

    outcome(
        worst_exact <= 1e-12 && worst_fd <= 1e-5 && checks == 1000,
        format!(
            "max |nu - grad f| / max(1, |grad f|) = {worst_exact:.2e} over {steps} steps (need <= 1e-12); \
             max finite-difference relative error {worst_fd:.2e} over {checks} pairs (need <= 1e-5)"
        ),
    )
}

// ---------------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let cmp = common::formula::compare_all();
    outcome(
        cmp.configs == 50 && cmp.passed(),
        format!(
            "{} configs, largest real-valued distance {} ulp (allowed {}), integer mismatches {}",
            cmp.configs,
            cmp.worst_ulps,
            common::formula::MAX_ULPS,
            cmp.integer_mismatches.len()
        ),
    )
}

// ---------------------------------------------------------------------- 8

fn csv_problems(text: &str, algorithms: &[String], epochs: u32) -> Vec<String> {
    let mut problems = Vec::new();
    let mut lines = text.lines();
    if lines.next() != Some(QUANTILE_CSV_HEADER) {
        problems.push("bad header".to_string());
    }
    let mut seen: Vec<(String, u32)> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            problems.push(format!("{line:?}: {} fields", fields.len()));
            continue;
        }
        let epoch = fields[1].parse::<u32>();
        let level = fields[2].parse::<f64>();
        let value = fields[3].parse::<f64>();
        match (epoch, level, value) {
            (Ok(e), Ok(l), Ok(v)) if (1..=epochs).contains(&e) && l > 0.0 && l < 1.0 && v.is_finite() && v >= 0.0 => {
                seen.push((fields[0].to_string(), e))
            }
            _ => problems.push(format!("{line:?}: unparsable or out of range")),
        }
    }
    for a in algorithms {
        let n = seen.iter().filter(|(name, _)| name == a).count();
        if n != epochs as usize {
            problems.push(format!("{a}: {n} rows, expected {epochs}"));
        }
    }
    problems
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let out = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::from_file(&manifest_dir().join("examples/configs/mushrooms.json")).unwrap();
    cfg.apply(&Overrides {
        output_dir: Some(out.path().to_path_buf()),
        ..Overrides::default()
    });
    let report = run_experiment(&cfg).unwrap();
    emit_csv(&report, out.path()).unwrap();
    let secs = start.elapsed().as_secs_f64();

    let sarah = report
        .algorithms
        .iter()
        .find(|a| a.name.starts_with("prob_sarah"))
        .expect("config includes Prob-SARAH");
    let q: Vec<f64> = sarah.trajectory.iter().map(|r| r.grad_norm_sq).collect();
    let rises: Vec<String> = (5..q.len())
        .filter(|&e| q[e] > 1.1 * q[e - 1])
        .map(|e| format!("epoch {}: {:.3e} -> {:.3e}", e, q[e - 1], q[e]))
        .collect();
    let drop = q[0] / q[q.len() - 1];

    let names: Vec<String> = report.algorithms.iter().map(|a| a.name.clone()).collect();
    let baselines_done = ["sgd", "svrg", "scsg"].iter().all(|b| {
        report
            .algorithms
            .iter()
            .any(|a| &a.name == b && a.ifo_per_run.len() == cfg.runs && a.ifo_per_run.iter().all(|&i| i > 0))
    });
    let csv = std::fs::read_to_string(out.path().join("quantiles.csv")).unwrap();
    let problems = csv_problems(&csv, &names, cfg.epochs);
    let summary_ok = std::fs::read_to_string(out.path().join("summary.json"))
        .ok()
        .and_then(|s| serde_json::from_str::<serde_json::Value>(&s).ok())
        .is_some();

    outcome(
        rises.is_empty() && drop >= 10.0 && baselines_done && problems.is_empty() && summary_ok && secs <= 600.0,
        format!(
            "{} runs x {} epochs; 0.9-quantile epoch 1 {:.3e} -> epoch {} {:.3e} ({drop:.1}x, need >= 10x); \
             rises above 10% after epoch 5: {}{}; baselines complete {baselines_done}; CSV problems {}; {secs:.1}s",
            cfg.runs,
            cfg.epochs,
            q[0],
            q.len(),
            q[q.len() - 1],
            rises.len(),
            rises.first().map(|r| format!(" [{r}]")).unwrap_or_default(),
            problems.len()
        ),
    )
}

// ---------------------------------------------------------------------- 9

/// Standard output plus every written file as `(relative path, bytes)`.
type Outputs = (Vec<u8>, Vec<(String, Vec<u8>)>);

/// Runs the binary, returning stdout and the bytes of every file it wrote
/// into `dir`, sorted by name.
fn invoke(args: &[String], dir: &Path) -> Result<Outputs, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_probsarah"))
        .args(args)
        .env_remove("PROBSARAH_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let mut files = Vec::new();
    for entry in walk(dir) {
        let rel = entry.strip_prefix(dir).unwrap().display().to_string();
        files.push((rel, std::fs::read(&entry).map_err(|e| e.to_string())?));
    }
    files.sort();
    Ok((out.stdout, files))
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut all = Vec::new();
    if let Ok(rd) = std::fs::read_dir(dir) {
        for e in rd.flatten() {
            let p = e.path();
            if p.is_dir() {
                all.extend(walk(&p));
            } else {
                all.push(p);
            }
        }
    }
    all
}

fn criterion_9() -> Outcome {
    let config = manifest_dir()
        .join("examples/configs/mushrooms.json")
        .display()
        .to_string();
    let data = manifest_dir().join("data/mushrooms.libsvm").display().to_string();
    let invocations: Vec<(&str, Vec<String>)> = vec![
        (
            "run",
            vec![
                "run", "--config", &config, "--seed", "7", "--runs", "3", "--out", "{out}",
            ],
        ),
        (
            "validate mah",
            vec![
                "validate",
                "mah",
                "--trials",
                "20000",
                "--seed",
                "7",
                "--out",
                "{out}/mah.json",
            ],
        ),
        (
            "validate mah (state-dependent)",
            vec![
                "validate",
                "mah",
                "--family",
                "state-dependent",
                "--trials",
                "5000",
                "--seed",
                "7",
            ],
        ),
        (
            "validate norm-hoeffding",
            vec![
                "validate",
                "norm-hoeffding",
                "--trials",
                "20000",
                "--seed",
                "7",
                "--out",
                "{out}/nh.json",
            ],
        ),
        (
            "validate monitor",
            vec![
                "validate",
                "monitor",
                "--runs",
                "4",
                "--seed",
                "7",
                "--out",
                "{out}/monitor.json",
            ],
        ),
        (
            "bounds csv",
            vec!["bounds", "--eps", "0.3", "--delta", "0.1", "--n", "10000"],
        ),
        (
            "bounds json",
            vec![
                "bounds",
                "--eps",
                "0.1",
                "--delta",
                "0.05",
                "--n",
                "500",
                "--setting",
                "B",
                "--format",
                "json",
            ],
        ),
        ("parse", vec!["parse", &data]),
    ]
    .into_iter()
    .map(|(name, a)| (name, a.into_iter().map(String::from).collect()))
    .collect();

    let mut failures = Vec::new();
    let mut compared = 0;
    for (name, args) in &invocations {
        // identical invocations, so both repetitions share the output path
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().display().to_string();
        let concrete: Vec<String> = args.iter().map(|a| a.replace("{out}", &out)).collect();
        let mut results = Vec::new();
        for _ in 0..2 {
            for p in walk(dir.path()) {
                std::fs::remove_file(p).unwrap();
            }
            results.push(invoke(&concrete, dir.path()));
        }
        match (&results[0], &results[1]) {
            (Ok(a), Ok(b)) if a == b => compared += a.1.len() + 1,
            (Ok(_), Ok(_)) => failures.push(format!("{name}: outputs differ")),
            (Err(e), _) | (_, Err(e)) => failures.push(format!("{name}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} invocations repeated, {compared} outputs byte-identical{}",
            invocations.len(),
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let (runs, cap, secs) = benchmark_runs();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "high-probability guarantee", criterion_1(&runs, secs)),
        (2, "bounded stopping", criterion_2(&runs, cap)),
        (3, "martingale Azuma-Hoeffding validator", criterion_3()),
        (4, "norm-Hoeffding validator", criterion_4()),
        (5, "estimator-error monitor", criterion_5(&runs)),
        (6, "exactness invariants", criterion_6()),
        (7, "formula fidelity", criterion_7()),
        (8, "mushrooms quantile trajectory", criterion_8()),
        (9, "CLI determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        failed += !o.pass as u32;
        println!(
            "{} criterion {id} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", results.len() as u32 - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
