//! Per-outer-iteration hyperparameters for Prob-SARAH.
//!
//! Setting A (growing batches, the target accuracy enters only the stopping
//! rule):
//!
//! ```text
//! η = 1/(4L)   B_j = min(j², n)   K_j = min(j, ⌈√n⌉)   b_j = ⌈l_j⌉·K_j
//! τ_j = j⁻³    δ′_j = δ/(4 C_e j⁴)
//! l_j = 18 (ln(2/δ′_j) + ln ln(2 d₁²/τ_j))
//! q_j = (128 α_M² / B_j) ln(3/δ′_j) · 1{B_j < n}
//! ε_j = 8 L² τ_j + 2 q_j        ε̃² = ε²/5
//! ```
//!
//! Setting B (full batches): `B_j = n`, `K_j = ⌈√n⌉`, `τ_j = min(ε²/(40L²), 1)`,
//! `q_j = 0`, `ε_j = ε̃²/2 = ε²/10`; `δ′_j`, `l_j` and `b_j` as above.
//!
//! [`Setting::Practical`] is setting A with `b_j = ⌈max(1, ln j)·K_j⌉`, the
//! `b_j ≈ K_j log j` inner batches used for experiments at a fixed step
//! size.
//!
//! All logarithms are natural.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::exact::{Ctx, Real};
use crate::objective::ProblemConstants;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    A,
    B,
    Practical,
}

impl std::str::FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Setting::A),
            "B" | "b" => Ok(Setting::B),
            "practical" | "Practical" => Ok(Setting::Practical),
            other => Err(Error::config(format!(
                "unknown setting {other:?}; expected A, B or practical"
            ))),
        }
    }
}

/// Everything the schedules depend on besides `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleInputs {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub lipschitz: f64,
    pub alpha_m: f64,
    pub diameter: f64,
}

impl ScheduleInputs {
    pub fn new(n: usize, eps: f64, delta: f64, constants: &ProblemConstants) -> Self {
        Self {
            n,
            eps,
            delta,
            lipschitz: constants.lipschitz,
            alpha_m: constants.alpha_m,
            diameter: constants.diameter(),
        }
    }

    /// Admissibility checks. `alpha_m` is only constrained when the setting
    /// uses it.
    pub fn validate(&self, setting: Setting) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("sample count n must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.eps > 1.0 / std::f64::consts::E {
            return Err(Error::config(format!("eps = {} exceeds 1/e", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return Err(Error::config(format!("L must be positive, got {}", self.lipschitz)));
        }
        if !(self.diameter >= 1.0 && self.diameter.is_finite()) {
            return Err(Error::config(format!("diameter d1 = {} is below 1", self.diameter)));
        }
        if setting != Setting::B && !(self.alpha_m * self.alpha_m >= 1.0 / 10240.0 && self.alpha_m.is_finite()) {
            return Err(Error::config(format!(
                "alpha_M^2 = {} is below 1/10240",
                self.alpha_m * self.alpha_m
            )));
        }
        Ok(())
    }
}

/// Hyperparameters of outer iteration `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub j: usize,
    pub eta: f64,
    pub big_batch: usize,
    pub inner_len: usize,
    pub mini_batch: usize,
    pub l: f64,
    pub q: f64,
    pub tau: f64,
    pub delta_prime: f64,
    pub eps_j: f64,
    pub eps_tilde_sq: f64,
    pub full_batch: bool,
}

impl ScheduleParams {
    /// IFO cost of one Prob-SARAH outer iteration: `B_j + 2 b_j K_j`.
    pub fn ifo_cost(&self) -> u64 {
        self.big_batch as u64 + 2 * self.mini_batch as u64 * self.inner_len as u64
    }

    /// Second stopping rule `ε_j ≤ ε²/2`, with `ε² = 5 ε̃²`.
    pub fn second_rule_holds(&self) -> bool {
        self.eps_j <= 0.5 * (5.0 * self.eps_tilde_sq)
    }
}

/// `⌈√n⌉` in exact integer arithmetic.
pub fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

fn delta_prime(cx: &mut Ctx, j: usize, delta: f64) -> Real {
    let j4 = Real::from_u64(j as u64).sq().sq();
    cx.c_e().mul_f(4.0).mul(&j4).recip_times(delta)
}

fn l_exact(cx: &mut Ctx, dp: &Real, diameter: f64, tau: &Real) -> Result<Real> {
    let arg = tau.recip_times(2.0).mul_f(diameter).mul_f(diameter);
    if !arg.gt_f(1.0) {
        return Err(Error::config(format!(
            "ln ln argument 2 d1^2 / tau = {} must exceed 1",
            arg.to_f64()
        )));
    }
    let ln_arg = cx.ln(&arg);
    let l = cx.ln(&dp.recip_times(2.0)).add(&cx.ln(&ln_arg)).mul_f(18.0);
    if !l.gt_f(0.0) || !l.to_f64().is_finite() {
        return Err(Error::config(format!(
            "multiplier l_j = {} is not positive",
            l.to_f64()
        )));
    }
    Ok(l)
}

/// `18 (ln(2/δ′) + ln ln(2 d₁²/τ))`.
pub fn l_multiplier(delta_prime: f64, diameter: f64, tau: f64) -> Result<f64> {
    let mut cx = Ctx::new();
    l_exact(&mut cx, &Real::from_f64(delta_prime), diameter, &Real::from_f64(tau)).map(|l| l.to_f64())
}

fn checked_j(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::config("outer iteration index j starts at 1"));
    }
    Ok(())
}

fn inv_cube(j: usize) -> Real {
    let jr = Real::from_u64(j as u64);
    jr.sq().mul(&jr).recip_times(1.0)
}

fn eps_sq_over(inputs: &ScheduleInputs, d: f64) -> f64 {
    Real::from_f64(inputs.eps).sq().div_f(d).to_f64()
}

pub fn schedule_a(j: usize, inputs: &ScheduleInputs) -> Result<ScheduleParams> {
    checked_j(j)?;
    inputs.validate(Setting::A)?;
    let mut cx = Ctx::new();
    let tau = inv_cube(j);
    let dp = delta_prime(&mut cx, j, inputs.delta);
    let l = l_exact(&mut cx, &dp, inputs.diameter, &tau)?;
    let inner_len = j.min(ceil_sqrt(inputs.n));
    let mini_batch = l.ceil_u64("l_j")? as usize * inner_len;
    Ok(growing_batch_params(
        &mut cx,
        j,
        inputs,
        &tau,
        &dp,
        l.to_f64(),
        mini_batch,
    ))
}

pub fn schedule_b(j: usize, inputs: &ScheduleInputs) -> Result<ScheduleParams> {
    checked_j(j)?;
    inputs.validate(Setting::B)?;
    let mut cx = Ctx::new();
    let n = inputs.n;
    let lip = inputs.lipschitz;
    let tau = Real::from_f64(inputs.eps)
        .sq()
        .div(&Real::from_f64(lip).sq().mul_f(40.0))
        .min_f(1.0);
    let dp = delta_prime(&mut cx, j, inputs.delta);
    let l = l_exact(&mut cx, &dp, inputs.diameter, &tau)?;
    let inner_len = ceil_sqrt(n);
    Ok(ScheduleParams {
        j,
        eta: 1.0 / (4.0 * lip),
        big_batch: n,
        inner_len,
        mini_batch: l.ceil_u64("l_j")? as usize * inner_len,
        l: l.to_f64(),
        q: 0.0,
        tau: tau.to_f64(),
        delta_prime: dp.to_f64(),
        eps_j: eps_sq_over(inputs, 10.0),
        eps_tilde_sq: eps_sq_over(inputs, 5.0),
        full_batch: true,
    })
}

/// Setting A's batches and error terms with `b_j = ⌈max(1, ln j)·K_j⌉`.
pub fn schedule_practical(j: usize, inputs: &ScheduleInputs) -> Result<ScheduleParams> {
    checked_j(j)?;
    inputs.validate(Setting::Practical)?;
    let mut cx = Ctx::new();
    let tau = inv_cube(j);
    let dp = delta_prime(&mut cx, j, inputs.delta);
    let ln_j = cx.ln(&Real::from_u64(j as u64));
    let l = if ln_j.gt_f(1.0) { ln_j } else { Real::from_f64(1.0) };
    let inner_len = j.min(ceil_sqrt(inputs.n));
    let mini_batch = l.mul_f(inner_len as f64).ceil_u64("b_j")? as usize;
    Ok(growing_batch_params(
        &mut cx,
        j,
        inputs,
        &tau,
        &dp,
        l.to_f64(),
        mini_batch,
    ))
}

fn growing_batch_params(
    cx: &mut Ctx,
    j: usize,
    inputs: &ScheduleInputs,
    tau: &Real,
    dp: &Real,
    l: f64,
    mini_batch: usize,
) -> ScheduleParams {
    let n = inputs.n;
    let big_batch = j.saturating_mul(j).min(n);
    let inner_len = j.min(ceil_sqrt(n));
    let full_batch = big_batch == n;
    let q = if full_batch {
        Real::from_f64(0.0)
    } else {
        Real::from_f64(inputs.alpha_m)
            .sq()
            .mul_f(128.0)
            .div_f(big_batch as f64)
            .mul(&cx.ln(&dp.recip_times(3.0)))
    };
    let lip = inputs.lipschitz;
    let eps_j = Real::from_f64(lip).sq().mul_f(8.0).mul(tau).add(&q.mul_f(2.0));
    ScheduleParams {
        j,
        eta: 1.0 / (4.0 * lip),
        big_batch,
        inner_len,
        mini_batch,
        l,
        q: q.to_f64(),
        tau: tau.to_f64(),
        delta_prime: dp.to_f64(),
        eps_j: eps_j.to_f64(),
        eps_tilde_sq: eps_sq_over(inputs, 5.0),
        full_batch,
    }
}

pub fn schedule(setting: Setting, j: usize, inputs: &ScheduleInputs) -> Result<ScheduleParams> {
    match setting {
        Setting::A => schedule_a(j, inputs),
        Setting::B => schedule_b(j, inputs),
        Setting::Practical => schedule_practical(j, inputs),
    }
}

pub const CSV_HEADER: &str = "j,B_j,K_j,b_j,l_j,q_j,tau_j,delta_prime_j,eps_j";

/// Schedule table for `j = 1..=j_max` as CSV.
pub fn schedule_csv(setting: Setting, inputs: &ScheduleInputs, j_max: usize) -> Result<String> {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for j in 1..=j_max {
        let p = schedule(setting, j, inputs)?;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            p.j, p.big_batch, p.inner_len, p.mini_batch, p.l, p.q, p.tau, p.delta_prime, p.eps_j
        );
    }
    Ok(s)
}

/// Smallest `j ≤ j_max` at which the second stopping rule holds.
pub fn first_second_rule_index(setting: Setting, inputs: &ScheduleInputs, j_max: usize) -> Result<Option<usize>> {
    for j in 1..=j_max {
        if schedule(setting, j, inputs)?.second_rule_holds() {
            return Ok(Some(j));
        }
    }
    Ok(None)
}
