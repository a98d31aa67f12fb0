//! Monte-Carlo validators for the probabilistic bounds behind Prob-SARAH.
//!
//! - [`validate_mah`]: the martingale Azuma-Hoeffding inequality with random
//!   bounds. For a martingale difference sequence `z_k` with `‖z_k‖ ≤ r_k`
//!   (`r_k` known at step `k`), with probability at least `1 − δ`, for every
//!   `t ≤ K` either `Σ_{k≤t} r_k² ≥ B` or
//!   `‖Σ_{k≤t} z_k‖² ≤ 9 max(Σ_{k≤t} r_k², b)(ln(2/δ) + ln ln(B/b))`.
//! - [`validate_norm_hoeffding`]: for a size-`k` subset drawn without
//!   replacement from vectors bounded by `σ`,
//!   `P(‖mean_J − mean‖ ≥ t) ≤ 3 exp(−k t²/(64σ²))` and
//!   `E‖mean_J − mean‖² ≤ 16σ²/k`.
//! - [`OmegaMonitor`]: checks the estimator-error bound
//!   `‖ν_k − ∇f(x_k)‖² ≤ l_j(σ̃_k² + 4L²τ_j k/b_j) + q_j` on a live run.
//!
//! These tests can refute a broken implementation; they never prove a
//! bound. Every trial gets its own RNG stream derived from the master seed
//! and the trial index, so reports do not depend on thread scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{axpy, dist_sq, norm_sq, scale};
use crate::objective::{uniform_on_sphere, FiniteSum};
use crate::optimizer::{StepObserver, StepView};
use crate::rng::{derive_seed, stream, SubsetSampler};
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Empirical failure frequency of a probabilistic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub trials: u64,
    pub violations: u64,
    pub frequency: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    /// The failure probability the bound claims.
    pub claimed: f64,
}

impl ViolationReport {
    pub fn new(trials: u64, violations: u64, claimed: f64) -> Self {
        let (wilson_lower, wilson_upper) = wilson_interval(violations, trials);
        Self {
            trials,
            violations,
            frequency: if trials == 0 {
                0.0
            } else {
                violations as f64 / trials as f64
            },
            wilson_lower,
            wilson_upper,
            claimed,
        }
    }

    /// The upper confidence limit does not exceed the claimed probability.
    pub fn consistent(&self) -> bool {
        self.wilson_upper <= self.claimed
    }

    /// The two confidence intervals intersect.
    pub fn overlaps(&self, other: &ViolationReport) -> bool {
        self.wilson_lower <= other.wilson_upper && other.wilson_lower <= self.wilson_upper
    }

    pub fn summary(&self) -> String {
        format!(
            "{}/{} violations (freq {:.3e}, 95% CI [{:.3e}, {:.3e}], claimed <= {:.3e})",
            self.violations, self.trials, self.frequency, self.wilson_lower, self.wilson_upper, self.claimed
        )
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lower = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    (lower, (center + half).min(1.0))
}

/// How the increments `z_k` and radii `r_k` are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MartingaleFamily {
    /// `z_k = r·u_k` with `u_k` uniform on the sphere.
    UniformSphere,
    /// `z_k = r·s_k/√d` with independent Rademacher signs `s_k ∈ {±1}^d`.
    Rademacher,
    /// `r_k = clamp(c‖s_{k−1}‖, r, r_max)` with a uniform direction: the
    /// radius depends on the path so far.
    StateDependent { c: f64, r_max: f64 },
    /// Uniform directions of radius `r` until `‖s_t‖² ≥ ratio·max(Σr², b)`,
    /// then `z_k = r_k = 0`: the path freezes at a large deviation.
    AdversarialStopping { ratio: f64 },
    /// `z_k = r_k = 0`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleTrialConfig {
    pub dim: usize,
    pub len: usize,
    pub family: MartingaleFamily,
    /// Base radius `r`.
    pub radius: f64,
    pub delta: f64,
    pub big_b: f64,
    pub small_b: f64,
    pub trials: u64,
    pub seed: u64,
}

impl MartingaleTrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.len == 0 {
            return Err(Error::config("dimension and length must be at least 1"));
        }
        if !(self.small_b > 0.0 && self.big_b > self.small_b) {
            return Err(Error::config(format!(
                "bracket needs B > b > 0, got B = {}, b = {}",
                self.big_b, self.small_b
            )));
        }
        if !(self.big_b / self.small_b > std::f64::consts::E) {
            return Err(Error::config("bracket needs B/b > e so that ln ln(B/b) > 0"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::config("radius must be non-negative"));
        }
        match self.family {
            MartingaleFamily::StateDependent { c, r_max } if !(c >= 0.0 && r_max >= self.radius) => {
                Err(Error::config("state-dependent family needs c >= 0 and r_max >= r"))
            }
            MartingaleFamily::AdversarialStopping { ratio } if !(ratio > 0.0) => {
                Err(Error::config("adversarial stopping ratio must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// `9 (ln(2/δ) + ln ln(B/b))`, the factor multiplying `max(Σr², b)`.
    pub fn bound_factor(&self) -> f64 {
        9.0 * ((2.0 / self.delta).ln() + (self.big_b / self.small_b).ln().ln())
    }
}

fn fill_sphere<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let u = uniform_on_sphere(out.len(), rng);
    out.copy_from_slice(&u);
}

/// Simulates one path and reports whether the bound failed at some `t`
/// before the `Σr² ≥ B` escape clause triggered.
fn mah_trial(cfg: &MartingaleTrialConfig, factor: f64, trial: u64) -> bool {
    let mut rng = stream(derive_seed(cfg.seed, &[trial]));
    let d = cfg.dim;
    let mut s = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut sum_r2 = 0.0;
    let mut frozen = false;
    for _ in 0..cfg.len {
        let r = match cfg.family {
            MartingaleFamily::Zero => 0.0,
            MartingaleFamily::UniformSphere => {
                fill_sphere(&mut rng, &mut z);
                cfg.radius
            }
            MartingaleFamily::Rademacher => {
                let a = 1.0 / (d as f64).sqrt();
                z.iter_mut()
                    .for_each(|v| *v = if rng.random::<bool>() { a } else { -a });
                cfg.radius
            }
            MartingaleFamily::StateDependent { c, r_max } => {
                fill_sphere(&mut rng, &mut z);
                (c * norm_sq(&s).sqrt()).clamp(cfg.radius, r_max)
            }
            MartingaleFamily::AdversarialStopping { .. } if frozen => 0.0,
            MartingaleFamily::AdversarialStopping { .. } => {
                fill_sphere(&mut rng, &mut z);
                cfg.radius
            }
        };
        if r > 0.0 {
            scale(r, &mut z);
            axpy(1.0, &z, &mut s);
        }
        sum_r2 += r * r;
        if sum_r2 >= cfg.big_b {
            return false;
        }
        let level = sum_r2.max(cfg.small_b);
        let dev = norm_sq(&s);
        if dev > factor * level {
            return true;
        }
        if let MartingaleFamily::AdversarialStopping { ratio } = cfg.family {
            frozen |= dev >= ratio * level;
        }
    }
    false
}

pub fn validate_mah(cfg: &MartingaleTrialConfig) -> Result<ViolationReport> {
    cfg.validate()?;
    let factor = cfg.bound_factor();
    let violations = (0..cfg.trials)
        .into_par_iter()
        .filter(|&t| mah_trial(cfg, factor, t))
        .count() as u64;
    Ok(ViolationReport::new(cfg.trials, violations, cfg.delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub t: f64,
    /// `min(1, 3 exp(−k t²/(64σ²)))`.
    pub bound: f64,
    pub report: ViolationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormHoeffdingReport {
    pub n: usize,
    pub k: usize,
    pub sigma: f64,
    pub thresholds: Vec<ThresholdReport>,
    /// Empirical `E‖mean_J − mean‖²`.
    pub mean_sq: f64,
    /// `16σ²/k`.
    pub mean_sq_bound: f64,
}

impl NormHoeffdingReport {
    pub fn tails_within_bound(&self) -> bool {
        self.thresholds.iter().all(|t| t.report.frequency <= t.bound)
    }
}

pub fn norm_hoeffding_bound(k: usize, t: f64, sigma: f64) -> f64 {
    (3.0 * (-(k as f64) * t * t / (64.0 * sigma * sigma)).exp()).min(1.0)
}

pub fn validate_norm_hoeffding(
    vectors: &[Vec<f64>],
    sigma: f64,
    k: usize,
    t_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<NormHoeffdingReport> {
    let n = vectors.len();
    if n == 0 {
        return Err(Error::config("need at least one vector"));
    }
    if k == 0 || k > n {
        return Err(Error::config(format!("subset size k = {k} must lie in 1..={n}")));
    }
    if trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let d = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            got: v.len(),
        });
    }
    let max_norm = vectors.iter().map(|v| norm_sq(v).sqrt()).fold(0.0, f64::max);
    if !(sigma >= 0.0) || max_norm > sigma * (1.0 + 1e-12) {
        return Err(Error::config(format!("vector norm {max_norm} exceeds sigma = {sigma}")));
    }
    if sigma == 0.0 {
        return Err(Error::config("sigma = 0 leaves the bound undefined"));
    }
    let mut mean = vec![0.0; d];
    for v in vectors {
        axpy(1.0 / n as f64, v, &mut mean);
    }

    let deviations: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(derive_seed(seed, &[trial]));
            let mut sampler = SubsetSampler::new(n);
            let mut m = vec![0.0; d];
            for &i in sampler.draw(k, &mut rng) {
                axpy(1.0 / k as f64, &vectors[i], &mut m);
            }
            dist_sq(&m, &mean)
        })
        .collect();

    let thresholds = t_grid
        .iter()
        .map(|&t| {
            let t2 = t * t;
            let hits = deviations.iter().filter(|&&dev| dev >= t2).count() as u64;
            let bound = norm_hoeffding_bound(k, t, sigma);
            ThresholdReport {
                t,
                bound,
                report: ViolationReport::new(trials, hits, bound),
            }
        })
        .collect();
    Ok(NormHoeffdingReport {
        n,
        k,
        sigma,
        thresholds,
        mean_sq: deviations.iter().sum::<f64>() / trials as f64,
        mean_sq_bound: 16.0 * sigma * sigma / k as f64,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub checks: u64,
    pub violations: u64,
    /// Outer iterations with at least one violated step.
    pub violated_outers: Vec<usize>,
    /// Largest `‖ν_k − ∇f(x_k)‖² / bound` seen.
    pub max_ratio: f64,
}

impl OmegaReport {
    pub fn any_violation(&self) -> bool {
        self.violations > 0
    }
}

/// Step observer checking the estimator-error bound at every `(j, k)`,
/// `0 ≤ k ≤ K_j`, with
/// `σ̃_k² = (4L²η²/b_j) Σ_{m=1}^{k} ‖ν_{m−1}‖²`.
///
/// A relative slack of `1e−12 (1 + ‖∇f(x_k)‖²)` absorbs round-off when the
/// bound is exactly zero (a full-batch checkpoint).
pub struct OmegaMonitor<'a, F: ?Sized> {
    f: &'a F,
    lipschitz: f64,
    acc: f64,
    prev_nu_sq: f64,
    report: OmegaReport,
    /// `(j, k, σ̃_k², ‖ν_k‖²)` for every step, when enabled.
    log: Option<Vec<(usize, usize, f64, f64)>>,
}

impl<'a, F: FiniteSum + ?Sized> OmegaMonitor<'a, F> {
    pub fn new(f: &'a F) -> Self {
        Self {
            f,
            lipschitz: f.constants().lipschitz,
            acc: 0.0,
            prev_nu_sq: 0.0,
            report: OmegaReport::default(),
            log: None,
        }
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn log(&self) -> &[(usize, usize, f64, f64)] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn report(&self) -> &OmegaReport {
        &self.report
    }

    pub fn into_report(self) -> OmegaReport {
        self.report
    }
}

impl<F: FiniteSum + ?Sized> StepObserver for OmegaMonitor<'_, F> {
    fn on_step(&mut self, v: &StepView<'_>) {
        let p = v.params;
        if v.k == 0 {
            self.acc = 0.0;
        } else {
            self.acc += self.prev_nu_sq;
        }
        self.prev_nu_sq = v.nu_sq;
        let l2 = self.lipschitz * self.lipschitz;
        let b = p.mini_batch as f64;
        let sigma_sq = 4.0 * l2 * v.eta * v.eta / b * self.acc;
        let bound = p.l * (sigma_sq + 4.0 * l2 * p.tau * v.k as f64 / b) + p.q;

        let g = self.f.full_gradient(v.x);
        let err = dist_sq(v.nu, &g);
        let slack = 1e-12 * (1.0 + norm_sq(&g));
        self.report.checks += 1;
        if bound > 0.0 {
            self.report.max_ratio = self.report.max_ratio.max(err / bound);
        }
        if err > bound + slack {
            self.report.violations += 1;
            if self.report.violated_outers.last() != Some(&v.j) {
                self.report.violated_outers.push(v.j);
            }
        }
        if let Some(log) = self.log.as_mut() {
            log.push((v.j, v.k, sigma_sq, v.nu_sq));
        }
    }
}
