//! Command-line front end. Exit codes: 0 success, 1 configuration error,
//! 2 runtime failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prob_sarah::bounds::{iteration_thresholds, stop_bound_b, stop_bounds_a};
use prob_sarah::concentration::{validate_mah, validate_norm_hoeffding, MartingaleFamily, MartingaleTrialConfig};
use prob_sarah::data::{read_libsvm, ParseOptions};
use prob_sarah::harness::{emit_csv, run_experiment, AlgorithmSpec, ExperimentConfig, Overrides, ProblemSpec};
use prob_sarah::objective::{uniform_in_ball, ProblemConstants};
use prob_sarah::rng::{derive_seed, stream};
use prob_sarah::schedule::{schedule_csv, ScheduleInputs, Setting};
use prob_sarah::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "probsarah", version, about = "Prob-SARAH experiments, bounds and validators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-run experiment from a JSON config.
    Run(RunArgs),
    /// Monte-Carlo checks of the concentration bounds.
    Validate {
        #[command(subcommand)]
        which: Validator,
    },
    /// Print stopping-time bounds and the schedule table.
    Bounds(BoundsArgs),
    /// Summarise a LIBSVM file.
    Parse(ParseArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    setting: Option<Setting>,
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Sphere,
    Rademacher,
    StateDependent,
    Adversarial,
}

#[derive(Subcommand)]
enum Validator {
    /// Martingale Azuma-Hoeffding with random bounds.
    Mah {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        len: usize,
        #[arg(long, value_enum, default_value_t = Family::Sphere)]
        family: Family,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 101.0)]
        big_b: f64,
        #[arg(long, default_value_t = 1.0)]
        small_b: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Norm-Hoeffding bound for sampling without replacement.
    NormHoeffding {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "1.9,1.95,2")]
        t: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Estimator-error bound on seeded runs of the synthetic benchmark.
    Monitor {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value = "A")]
        setting: Setting,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    delta_f: f64,
    #[arg(long, default_value_t = 1.0)]
    delta_f0: f64,
    /// Domain diameter `d₁ = 2R`.
    #[arg(long, default_value_t = 100.0)]
    diameter: f64,
    #[arg(long, default_value = "A")]
    setting: Setting,
    /// Rows of the schedule table (0 to omit it).
    #[arg(long, default_value_t = 10)]
    j_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ParseArgs {
    path: PathBuf,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    dim: Option<usize>,
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("PROBSARAH_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("PROBSARAH_SEED = {s:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn seed_of(common: &Common) -> Result<u64> {
    Ok(common.seed.or(env_seed()?).unwrap_or(0))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    cfg.apply(&Overrides {
        seed: args.seed,
        fallback_seed: env_seed()?,
        output_dir: args.out,
        runs: args.runs,
        eps: args.eps,
        delta: args.delta,
        setting: args.setting,
        normalize: args.normalize.then_some(true),
    });
    let dir = cfg
        .output_dir
        .clone()
        .ok_or_else(|| Error::Config("no output directory: pass --out or set output_dir".into()))?;
    let report = run_experiment(&cfg)?;
    emit_csv(&report, &dir)?;
    for a in &report.algorithms {
        eprintln!(
            "{}: {}/{} stopped, success {:.3}, final below eps {:.3}",
            a.name, a.stopped, a.runs, a.success_frequency, a.final_below_eps_frequency
        );
    }
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn validate(which: Validator) -> Result<()> {
    match which {
        Validator::Mah {
            common,
            dim,
            len,
            family,
            radius,
            delta,
            big_b,
            small_b,
            trials,
        } => {
            let family = match family {
                Family::Sphere => MartingaleFamily::UniformSphere,
                Family::Rademacher => MartingaleFamily::Rademacher,
                Family::StateDependent => MartingaleFamily::StateDependent {
                    c: 0.5,
                    r_max: 4.0 * radius,
                },
                Family::Adversarial => MartingaleFamily::AdversarialStopping { ratio: 2.0 },
            };
            let cfg = MartingaleTrialConfig {
                dim,
                len,
                family,
                radius,
                delta,
                big_b,
                small_b,
                trials,
                seed: seed_of(&common)?,
            };
            let report = validate_mah(&cfg)?;
            eprintln!("mah: {}", report.summary());
            emit(
                common.out.as_deref(),
                &pretty(&json!({"config": cfg, "report": report})),
            )
        }
        Validator::NormHoeffding {
            common,
            n,
            dim,
            k,
            t,
            trials,
        } => {
            let seed = seed_of(&common)?;
            let mut rng = stream(derive_seed(seed, &[u64::MAX]));
            let vectors: Vec<Vec<f64>> = (0..n).map(|_| uniform_in_ball(dim, 1.0, &mut rng)).collect();
            let report = validate_norm_hoeffding(&vectors, 1.0, k, &t, trials, seed)?;
            for th in &report.thresholds {
                eprintln!(
                    "t = {}: tail {:.3e} vs bound {:.3e}",
                    th.t, th.report.frequency, th.bound
                );
            }
            emit(common.out.as_deref(), &pretty(&report))
        }
        Validator::Monitor {
            common,
            runs,
            eps,
            delta,
            setting,
        } => {
            let cfg = ExperimentConfig {
                problem: ProblemSpec::nonconvex_quadratic(1),
                algorithms: vec![AlgorithmSpec::ProbSarah {
                    name: None,
                    setting,
                    step: None,
                    continue_after_stop: false,
                    monitor: true,
                }],
                runs,
                quantile_levels: vec![1.0 - delta],
                epochs: 10_000,
                seed: Some(seed_of(&common)?),
                eps,
                delta,
                normalize: false,
                output_dir: None,
            };
            let report = run_experiment(&cfg)?;
            let a = &report.algorithms[0];
            let violated = a.omega_violation_runs.unwrap_or(0);
            eprintln!("monitor: {violated}/{runs} runs with a violation");
            emit(
                common.out.as_deref(),
                &pretty(&json!({
                    "runs": runs,
                    "runs_with_violation": violated,
                    "frequency": violated as f64 / runs as f64,
                    "delta": delta,
                    "success_frequency": a.success_frequency,
                })),
            )
        }
    }
}

fn bounds(a: BoundsArgs) -> Result<()> {
    let sb = stop_bounds_a(a.eps, a.delta, a.n, a.lipschitz, a.delta_f, a.alpha)?;
    let (t5, _) = stop_bound_b(a.eps, a.n, a.lipschitz, a.delta_f0)?;
    let it = iteration_thresholds(a.eps, a.n)?;
    let consts = ProblemConstants {
        lipschitz: a.lipschitz,
        alpha_m: a.alpha,
        radius: a.diameter / 2.0,
    };
    let inputs = ScheduleInputs::new(a.n, a.eps, a.delta, &consts);
    let table = if a.j_max > 0 {
        Some(schedule_csv(a.setting, &inputs, a.j_max)?)
    } else {
        None
    };
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("c1,c2,c3,c4,T1,T2,T3,T4,outer_cap,T5,t_plain,t_log\n");
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                sb.c1,
                sb.c2,
                sb.c3,
                sb.c4,
                sb.t1,
                sb.t2,
                sb.t3,
                sb.t4,
                sb.outer_cap,
                t5,
                it.t_plain,
                it.t_log.map(|t| t.to_string()).unwrap_or_default()
            ));
            if let Some(t) = table {
                s.push('\n');
                s.push_str(&t);
            }
            s
        }
        Format::Json => pretty(&json!({
            "stop_bounds": sb,
            "t5": t5,
            "iteration_thresholds": it,
            "schedule_csv": table,
        })),
    };
    emit(None, &text)
}

fn parse(a: ParseArgs) -> Result<()> {
    let mut ds = read_libsvm(&a.path, ParseOptions { dim: a.dim })?;
    if a.normalize {
        ds = ds.normalize_rows();
    }
    let positives = ds.labels().iter().filter(|&&y| y > 0.0).count();
    emit(
        None,
        &pretty(&json!({
            "path": a.path,
            "n": ds.n(),
            "dim": ds.dim(),
            "nnz": ds.nnz(),
            "positives": positives,
            "negatives": ds.n() - positives,
            "max_row_norm": ds.max_row_norm(),
        })),
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Validate { which } => validate(which),
        Command::Bounds(a) => bounds(a),
        Command::Parse(a) => parse(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
