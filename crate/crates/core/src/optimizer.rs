//! Prob-SARAH and the SGD / SVRG / SCSG baselines.
//!
//! All optimizers share one trace format ([`RunTrace`]) and one accounting
//! unit: an IFO call is a single `∇f_i(x)` evaluation. Full-gradient
//! evaluations made for monitoring (`‖∇f(x)‖²` snapshots, the optional
//! per-step record) are not charged.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::bounds::{stop_bound_b, stop_bounds_a};
use crate::linalg::{axpy, norm_sq};
use crate::objective::{project_in_place, FiniteSum};
use crate::rng::{draw_with_replacement, stream, StreamRng, SubsetSampler};
use crate::schedule::{schedule, ScheduleInputs, ScheduleParams, Setting};
use crate::{Error, Result};

/// Step size rule for Prob-SARAH.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSize {
    /// `η_j` from the schedule, `1/(4L)`.
    Theory,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub setting: Setting,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    /// Outer-iteration cap. `None` means `4·max(T1..T4)` (`4·T5` under
    /// setting B).
    pub max_outer: Option<usize>,
    /// IFO budget in epochs (multiples of `n`), checked before each outer
    /// iteration.
    pub epoch_budget: Option<f64>,
    pub step: StepSize,
    /// Starting point; the origin when `None`.
    pub x0: Option<Vec<f64>>,
    /// `Δ_f` used for the default cap. When `None`, `f(x̃₀)` is used, which
    /// bounds `f(x̃₀) − inf f` for the non-negative objectives in this crate.
    pub delta_f: Option<f64>,
    /// Record `‖∇f(x_k)‖²` at every inner step.
    pub monitor: bool,
    /// Record `‖∇f‖²` at every epoch boundary.
    pub snapshots: bool,
    /// Keep iterating after the stopping rule fires (the stop is still
    /// recorded). Used to draw full trajectories.
    pub continue_after_stop: bool,
    /// Debug only: use `B_j = b_j = n` with sampling without replacement, so
    /// that `ν_k = ∇f(x_k)` exactly.
    pub debug_full_batch: bool,
}

impl RunConfig {
    pub fn new(setting: Setting, eps: f64, delta: f64, seed: u64) -> Self {
        Self {
            setting,
            eps,
            delta,
            seed,
            max_outer: None,
            epoch_budget: None,
            step: StepSize::Theory,
            x0: None,
            delta_f: None,
            monitor: false,
            snapshots: false,
            continue_after_stop: false,
            debug_full_batch: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub j: usize,
    pub k: usize,
    pub nu_sq: f64,
    /// Cumulative IFO count after this step.
    pub ifo: u64,
    pub grad_sq: Option<f64>,
}

/// Stopping-rule bookkeeping of one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub j: usize,
    pub eta: f64,
    pub big_batch: usize,
    pub inner_len: usize,
    pub mini_batch: usize,
    pub eps_j: f64,
    pub eps_tilde_sq: f64,
    /// `(1/K) Σ_{k<K} ‖ν_k‖²`.
    pub avg_nu_sq: f64,
    pub first_rule: bool,
    pub second_rule: bool,
    pub ifo: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopInfo {
    pub outer: usize,
    pub k_hat: usize,
    pub x_hat: Vec<f64>,
    pub grad_sq: f64,
    pub ifo: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub epoch: u32,
    pub ifo: u64,
    pub grad_sq: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: String,
    pub n: usize,
    pub steps: Vec<StepRecord>,
    pub outers: Vec<OuterRecord>,
    pub stop: Option<StopInfo>,
    pub snapshots: Vec<Snapshot>,
    pub ifo: u64,
    pub final_x: Vec<f64>,
    /// The run ended on the outer-iteration cap rather than the budget or
    /// the stopping rule.
    pub hit_outer_cap: bool,
}

impl RunTrace {
    pub fn stopped(&self) -> bool {
        self.stop.is_some()
    }
}

/// Total sample-gradient evaluations of a run.
pub fn ifo_cost(trace: &RunTrace) -> u64 {
    trace.ifo
}

/// What an observer sees after each Prob-SARAH estimator update (`k = 0` is
/// the checkpoint).
#[derive(Debug)]
pub struct StepView<'a> {
    pub j: usize,
    pub k: usize,
    pub params: &'a ScheduleParams,
    pub eta: f64,
    pub x: &'a [f64],
    pub nu: &'a [f64],
    pub nu_sq: f64,
}

pub trait StepObserver {
    fn on_step(&mut self, view: &StepView<'_>);
}

impl StepObserver for () {
    fn on_step(&mut self, _: &StepView<'_>) {}
}

/// IFO accounting and epoch snapshots.
struct Progress<'a, F: ?Sized> {
    f: &'a F,
    n: u64,
    ifo: u64,
    next_epoch: u32,
    snapshots: Option<Vec<Snapshot>>,
}

impl<'a, F: FiniteSum + ?Sized> Progress<'a, F> {
    fn new(f: &'a F, enabled: bool, x0: &[f64]) -> Self {
        let mut p = Self {
            f,
            n: f.n_samples() as u64,
            ifo: 0,
            next_epoch: 0,
            snapshots: enabled.then(Vec::new),
        };
        p.charge(0, x0);
        p
    }

    fn charge(&mut self, calls: u64, x: &[f64]) {
        self.ifo += calls;
        let Some(snaps) = self.snapshots.as_mut() else {
            return;
        };
        let mut g = None;
        while self.ifo >= self.next_epoch as u64 * self.n {
            let grad_sq = *g.get_or_insert_with(|| norm_sq(&self.f.full_gradient(x)));
            snaps.push(Snapshot {
                epoch: self.next_epoch,
                ifo: self.ifo,
                grad_sq,
            });
            self.next_epoch += 1;
        }
    }
}

fn budget_calls(epochs: Option<f64>, n: usize) -> Result<Option<u64>> {
    match epochs {
        None => Ok(None),
        Some(e) if e > 0.0 && e.is_finite() => Ok(Some((e * n as f64).ceil() as u64)),
        Some(e) => Err(Error::config(format!("epoch budget must be positive, got {e}"))),
    }
}

fn start_point<F: FiniteSum + ?Sized>(f: &F, x0: Option<&[f64]>) -> Result<Vec<f64>> {
    let d = f.dim();
    let mut x = match x0 {
        Some(x) if x.len() != d => {
            return Err(Error::Dimension {
                expected: d,
                got: x.len(),
            })
        }
        Some(x) => x.to_vec(),
        None => vec![0.0; d],
    };
    project_in_place(&mut x, f.constants().radius);
    Ok(x)
}

/// Overwrites `out` with the mean of `∇f_i(x)` over a uniform size-`size`
/// subset drawn without replacement.
pub fn checkpoint_estimate<F: FiniteSum + ?Sized, R: Rng + ?Sized>(
    f: &F,
    x: &[f64],
    size: usize,
    sampler: &mut SubsetSampler,
    rng: &mut R,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let idx = sampler.draw(size, rng);
    f.add_batch_gradient(idx, x, 1.0 / size as f64, out);
}

/// Adds `(1/b) Σ_{i∈I} [∇f_i(x) − ∇f_i(x_prev)]` to `nu`, with `I` given.
pub fn add_recursive_increment<F: FiniteSum + ?Sized>(
    f: &F,
    batch: &[usize],
    x: &[f64],
    x_prev: &[f64],
    nu: &mut [f64],
) {
    let w = 1.0 / batch.len() as f64;
    f.add_batch_gradient(batch, x, w, nu);
    f.add_batch_gradient(batch, x_prev, -w, nu);
}

fn default_outer_cap<F: FiniteSum + ?Sized>(f: &F, cfg: &RunConfig, x0: &[f64]) -> Result<usize> {
    if let Some(m) = cfg.max_outer {
        if m == 0 {
            return Err(Error::config("max_outer must be at least 1"));
        }
        return Ok(m);
    }
    let c = f.constants();
    let delta_f = cfg.delta_f.unwrap_or_else(|| f.loss(x0).max(0.0));
    let t = match cfg.setting {
        Setting::B => stop_bound_b(cfg.eps, f.n_samples(), c.lipschitz, delta_f)?.0,
        Setting::A | Setting::Practical => {
            stop_bounds_a(cfg.eps, cfg.delta, f.n_samples(), c.lipschitz, delta_f, c.alpha_m)?.max_t()
        }
    };
    Ok(usize::try_from(t.saturating_mul(4)).unwrap_or(usize::MAX))
}

/// Runs Prob-SARAH without an observer.
pub fn prob_sarah<F: FiniteSum + ?Sized>(f: &F, cfg: &RunConfig) -> Result<RunTrace> {
    prob_sarah_observed(f, cfg, &mut ())
}

/// Prob-SARAH with `observer` called after the checkpoint and every inner
/// update.
pub fn prob_sarah_observed<F: FiniteSum + ?Sized, O: StepObserver + ?Sized>(
    f: &F,
    cfg: &RunConfig,
    observer: &mut O,
) -> Result<RunTrace> {
    let n = f.n_samples();
    let d = f.dim();
    let constants = f.constants();
    let inputs = ScheduleInputs::new(n, cfg.eps, cfg.delta, &constants);
    inputs.validate(cfg.setting)?;
    if let StepSize::Fixed(eta) = cfg.step {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::config(format!("step size must be positive, got {eta}")));
        }
    }
    let radius = constants.radius;
    let budget = budget_calls(cfg.epoch_budget, n)?;
    let mut x_tilde = start_point(f, cfg.x0.as_deref())?;
    let max_outer = default_outer_cap(f, cfg, &x_tilde)?;

    let mut rng: StreamRng = stream(cfg.seed);
    let mut sampler = SubsetSampler::new(n);
    let mut progress = Progress::new(f, cfg.snapshots, &x_tilde);
    let mut trace = RunTrace {
        algorithm: "prob_sarah".into(),
        n,
        ..RunTrace::default()
    };

    let mut nu = vec![0.0; d];
    let mut x_prev = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut best_x = vec![0.0; d];
    let mut batch = Vec::new();
    let grad_sq_at = |x: &[f64]| norm_sq(&f.full_gradient(x));

    let mut j = 0usize;
    loop {
        if budget.is_some_and(|b| progress.ifo >= b) {
            break;
        }
        if j >= max_outer {
            trace.hit_outer_cap = true;
            break;
        }
        j += 1;
        let mut params = schedule(cfg.setting, j, &inputs)?;
        if cfg.debug_full_batch {
            params.big_batch = n;
            params.mini_batch = n;
        }
        let eta = match cfg.step {
            StepSize::Theory => params.eta,
            StepSize::Fixed(eta) => eta,
        };
        let k_len = params.inner_len;

        checkpoint_estimate(f, &x_tilde, params.big_batch, &mut sampler, &mut rng, &mut nu);
        progress.charge(params.big_batch as u64, &x_tilde);
        x.copy_from_slice(&x_tilde);
        let mut nu_sq = norm_sq(&nu);
        trace.steps.push(StepRecord {
            j,
            k: 0,
            nu_sq,
            ifo: progress.ifo,
            grad_sq: cfg.monitor.then(|| grad_sq_at(&x)),
        });
        observer.on_step(&StepView {
            j,
            k: 0,
            params: &params,
            eta,
            x: &x,
            nu: &nu,
            nu_sq,
        });

        let mut sum_nu_sq = nu_sq;
        let mut best = (nu_sq, 0usize);
        best_x.copy_from_slice(&x);

        for k in 1..=k_len {
            x_prev.copy_from_slice(&x);
            axpy(-eta, &nu, &mut x);
            project_in_place(&mut x, radius);
            if cfg.debug_full_batch {
                batch.clear();
                batch.extend_from_slice(sampler.draw(n, &mut rng));
            } else {
                draw_with_replacement(n, params.mini_batch, &mut rng, &mut batch);
            }
            add_recursive_increment(f, &batch, &x, &x_prev, &mut nu);
            progress.charge(2 * batch.len() as u64, &x);
            nu_sq = norm_sq(&nu);
            trace.steps.push(StepRecord {
                j,
                k,
                nu_sq,
                ifo: progress.ifo,
                grad_sq: cfg.monitor.then(|| grad_sq_at(&x)),
            });
            observer.on_step(&StepView {
                j,
                k,
                params: &params,
                eta,
                x: &x,
                nu: &nu,
                nu_sq,
            });
            if k < k_len {
                sum_nu_sq += nu_sq;
                if nu_sq < best.0 {
                    best = (nu_sq, k);
                    best_x.copy_from_slice(&x);
                }
            }
        }

        let avg_nu_sq = sum_nu_sq / k_len as f64;
        let first_rule = avg_nu_sq <= params.eps_tilde_sq;
        let second_rule = params.second_rule_holds();
        trace.outers.push(OuterRecord {
            j,
            eta,
            big_batch: params.big_batch,
            inner_len: k_len,
            mini_batch: params.mini_batch,
            eps_j: params.eps_j,
            eps_tilde_sq: params.eps_tilde_sq,
            avg_nu_sq,
            first_rule,
            second_rule,
            ifo: progress.ifo,
        });
        if first_rule && second_rule && trace.stop.is_none() {
            trace.stop = Some(StopInfo {
                outer: j,
                k_hat: best.1,
                grad_sq: grad_sq_at(&best_x),
                x_hat: best_x.clone(),
                ifo: progress.ifo,
            });
            if !cfg.continue_after_stop {
                break;
            }
        }
        x_tilde.copy_from_slice(&x);
    }

    trace.ifo = progress.ifo;
    trace.snapshots = progress.snapshots.unwrap_or_default();
    trace.final_x = match &trace.stop {
        Some(s) if !cfg.continue_after_stop => s.x_hat.clone(),
        _ => x_tilde,
    };
    Ok(trace)
}

/// Shared settings of the baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub step: f64,
    pub batch: usize,
    pub epochs: f64,
    pub seed: u64,
    pub x0: Option<Vec<f64>>,
    pub snapshots: bool,
}

impl BaselineConfig {
    fn validate(&self, n: usize) -> Result<u64> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::config(format!("step size must be positive, got {}", self.step)));
        }
        if self.batch == 0 {
            return Err(Error::config("batch size must be at least 1"));
        }
        Ok(budget_calls(Some(self.epochs), n)?.unwrap_or(u64::MAX))
    }
}

fn baseline_trace(name: &str, n: usize) -> RunTrace {
    RunTrace {
        algorithm: name.into(),
        n,
        ..RunTrace::default()
    }
}

/// Projected minibatch SGD, minibatches drawn with replacement.
pub fn sgd<F: FiniteSum + ?Sized>(f: &F, cfg: &BaselineConfig) -> Result<RunTrace> {
    let n = f.n_samples();
    let budget = cfg.validate(n)?;
    let radius = f.constants().radius;
    let mut x = start_point(f, cfg.x0.as_deref())?;
    let mut rng = stream(cfg.seed);
    let mut progress = Progress::new(f, cfg.snapshots, &x);
    let mut trace = baseline_trace("sgd", n);
    let mut g = vec![0.0; f.dim()];
    let mut batch = Vec::new();
    let mut k = 0;
    while progress.ifo < budget {
        k += 1;
        draw_with_replacement(n, cfg.batch, &mut rng, &mut batch);
        g.iter_mut().for_each(|v| *v = 0.0);
        f.add_batch_gradient(&batch, &x, 1.0 / cfg.batch as f64, &mut g);
        axpy(-cfg.step, &g, &mut x);
        project_in_place(&mut x, radius);
        progress.charge(cfg.batch as u64, &x);
        trace.steps.push(StepRecord {
            j: 1,
            k,
            nu_sq: norm_sq(&g),
            ifo: progress.ifo,
            grad_sq: None,
        });
    }
    trace.ifo = progress.ifo;
    trace.snapshots = progress.snapshots.unwrap_or_default();
    trace.final_x = x;
    Ok(trace)
}

/// SVRG: a full-gradient checkpoint per epoch followed by `inner_len`
/// control-variate steps (default `⌈n/b⌉`).
pub fn svrg<F: FiniteSum + ?Sized>(f: &F, cfg: &BaselineConfig, inner_len: Option<usize>) -> Result<RunTrace> {
    let n = f.n_samples();
    let budget = cfg.validate(n)?;
    let m = inner_len.unwrap_or_else(|| n.div_ceil(cfg.batch));
    if m == 0 {
        return Err(Error::config("SVRG inner length must be at least 1"));
    }
    let all: Vec<usize> = (0..n).collect();
    variance_reduced(f, cfg, budget, "svrg", |_, _| (all.clone(), m))
}

/// SCSG: a size-`big_batch` checkpoint drawn without replacement, then a
/// geometric number of inner steps with mean `big_batch / b`.
pub fn scsg<F: FiniteSum + ?Sized>(f: &F, cfg: &BaselineConfig, big_batch: usize) -> Result<RunTrace> {
    let n = f.n_samples();
    let budget = cfg.validate(n)?;
    if big_batch == 0 || big_batch > n {
        return Err(Error::config(format!(
            "SCSG checkpoint batch {big_batch} must lie in 1..={n}"
        )));
    }
    let p = cfg.batch as f64 / (big_batch + cfg.batch) as f64;
    let geom = Geometric::new(p).map_err(|e| Error::config(format!("SCSG inner-length law: {e}")))?;
    let mut sampler = SubsetSampler::new(n);
    variance_reduced(f, cfg, budget, "scsg", move |rng, _| {
        let idx = sampler.draw(big_batch, rng).to_vec();
        (idx, geom.sample(rng) as usize)
    })
}

/// Common loop of SVRG and SCSG. `plan` returns the checkpoint sample and
/// the inner length of the next epoch.
fn variance_reduced<F, P>(f: &F, cfg: &BaselineConfig, budget: u64, name: &str, mut plan: P) -> Result<RunTrace>
where
    F: FiniteSum + ?Sized,
    P: FnMut(&mut StreamRng, usize) -> (Vec<usize>, usize),
{
    let n = f.n_samples();
    let d = f.dim();
    let radius = f.constants().radius;
    let mut x = start_point(f, cfg.x0.as_deref())?;
    let mut rng = stream(cfg.seed);
    let mut progress = Progress::new(f, cfg.snapshots, &x);
    let mut trace = baseline_trace(name, n);
    let mut anchor = x.clone();
    let mut mu = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut batch = Vec::new();
    let mut j = 0;
    while progress.ifo < budget {
        j += 1;
        let (checkpoint, inner) = plan(&mut rng, j);
        mu.iter_mut().for_each(|t| *t = 0.0);
        f.add_batch_gradient(&checkpoint, &anchor, 1.0 / checkpoint.len() as f64, &mut mu);
        progress.charge(checkpoint.len() as u64, &x);
        trace.steps.push(StepRecord {
            j,
            k: 0,
            nu_sq: norm_sq(&mu),
            ifo: progress.ifo,
            grad_sq: None,
        });
        for k in 1..=inner {
            if progress.ifo >= budget {
                break;
            }
            v.copy_from_slice(&mu);
            draw_with_replacement(n, cfg.batch, &mut rng, &mut batch);
            add_recursive_increment(f, &batch, &x, &anchor, &mut v);
            axpy(-cfg.step, &v, &mut x);
            project_in_place(&mut x, radius);
            progress.charge(2 * cfg.batch as u64, &x);
            trace.steps.push(StepRecord {
                j,
                k,
                nu_sq: norm_sq(&v),
                ifo: progress.ifo,
                grad_sq: None,
            });
        }
        anchor.copy_from_slice(&x);
    }
    trace.ifo = progress.ifo;
    trace.snapshots = progress.snapshots.unwrap_or_default();
    trace.final_x = x;
    Ok(trace)
}
