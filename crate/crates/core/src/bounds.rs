//! Stopping-time bounds and iteration thresholds.
//!
//! Under setting A the two stopping rules are guaranteed (on a high
//! probability event) to be met within `T1`/`T2` and `T3`/`T4` outer
//! iterations respectively:
//!
//! ```text
//! c1 = C_e L/4 + (16 α²/L) ln(192 C_e/δ)    c2 = 64 α²/L
//! c3 = 8 L² + 256 α² ln(12 C_e/δ)          c4 = 1024 α²
//! T1 = ⌈√(320L(c1+Δ))/ε + 320L(c1+Δ)/(√n ε²)⌉
//! T2 = ⌈3(√(320Lc2)/ε · ln(√(320Lc2)/ε) + 640Lc2/(√n ε²) · ln(320Lc2/ε²) + 1)⌉
//! T3 = ⌈2√c3/ε⌉       T4 = ⌈6√c4/ε · ln(2√c4/ε)⌉
//! ```
//!
//! Setting B stops within `T5 = ⌈160 L (Δ⁰ + 1)/(√n ε²)⌉`.
//!
//! Everything is evaluated in extended precision; reals are rounded to `f64`
//! once and ceilings are taken of the unrounded value.

use serde::{Deserialize, Serialize};

use crate::exact::{Ctx, Real};
use crate::{Error, Result};

/// Constants and outer-iteration bounds for setting A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopBounds {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub t1: u64,
    pub t2: u64,
    pub t3: u64,
    pub t4: u64,
    /// `2·max(T1, T2, T3, T4)`.
    pub outer_cap: u64,
    /// `T1..T4` before the ceiling.
    pub raw: [f64; 4],
}

impl StopBounds {
    pub fn max_t(&self) -> u64 {
        self.t1.max(self.t2).max(self.t3).max(self.t4)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::config(format!("eps must be positive, got {eps}")));
    }
    if eps > 1.0 / std::f64::consts::E {
        return Err(Error::config(format!("eps = {eps} exceeds 1/e")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn ceil_u64(x: f64, what: &str) -> Result<u64> {
    if !x.is_finite() || x > u64::MAX as f64 {
        return Err(Error::config(format!("{what} = {x} is not representable")));
    }
    Ok(x.ceil().max(0.0) as u64)
}

pub fn stop_bounds_a(eps: f64, delta: f64, n: usize, lipschitz: f64, delta_f: f64, alpha_m: f64) -> Result<StopBounds> {
    check_eps(eps)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::config(format!("delta must lie in (0, 1), got {delta}")));
    }
    if n == 0 {
        return Err(Error::config("sample count n must be at least 1"));
    }
    check_positive("L", lipschitz)?;
    check_positive("alpha_M", alpha_m)?;
    if !(delta_f >= 0.0 && delta_f.is_finite()) {
        return Err(Error::config(format!("Delta_f must be non-negative, got {delta_f}")));
    }

    let mut cx = Ctx::new();
    let ce = cx.c_e();
    let l = Real::from_f64(lipschitz);
    let a2 = Real::from_f64(alpha_m).sq();
    let rn = Real::from_u64(n as u64).sqrt();
    let eps = Real::from_f64(eps);
    let eps2 = eps.sq();

    let c1 = ce
        .mul(&l)
        .div_f(4.0)
        .add(&a2.mul_f(16.0).div(&l).mul(&cx.ln(&ce.mul_f(192.0).div_f(delta))));
    let c2 = a2.mul_f(64.0).div(&l);
    let c3 = l
        .sq()
        .mul_f(8.0)
        .add(&a2.mul_f(256.0).mul(&cx.ln(&ce.mul_f(12.0).div_f(delta))));
    let c4 = a2.mul_f(1024.0);

    let s1 = l.mul_f(320.0).mul(&c1.add_f(delta_f));
    let t1 = s1.sqrt().div(&eps).add(&s1.div(&rn.mul(&eps2)));
    let s2 = l.mul_f(320.0).mul(&c2);
    let r2 = s2.sqrt().div(&eps);
    let t2 = r2
        .mul(&cx.ln(&r2))
        .add(&s2.mul_f(2.0).div(&rn.mul(&eps2)).mul(&cx.ln(&s2.div(&eps2))))
        .add_f(1.0)
        .mul_f(3.0);
    let t3 = c3.sqrt().mul_f(2.0).div(&eps);
    let sc4 = c4.sqrt();
    let t4 = sc4.mul_f(6.0).div(&eps).mul(&cx.ln(&sc4.mul_f(2.0).div(&eps)));

    let raw = [t1.to_f64(), t2.to_f64(), t3.to_f64(), t4.to_f64()];
    let [t1c, t2c, t3c, t4c] = [
        t1.ceil_u64("T1")?,
        t2.ceil_u64("T2")?,
        t3.ceil_u64("T3")?,
        t4.ceil_u64("T4")?,
    ];
    let [c1, c2, c3, c4] = [c1.to_f64(), c2.to_f64(), c3.to_f64(), c4.to_f64()];
    let mut b = StopBounds {
        c1,
        c2,
        c3,
        c4,
        t1: t1c,
        t2: t2c,
        t3: t3c,
        t4: t4c,
        outer_cap: 0,
        raw,
    };
    b.outer_cap = 2 * b.max_t();
    Ok(b)
}

/// `160 L (Δ⁰ + 1)/(√n ε²)`, returned as `(⌈·⌉, raw)`.
pub fn stop_bound_b(eps: f64, n: usize, lipschitz: f64, delta_f0: f64) -> Result<(u64, f64)> {
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::config("sample count n must be at least 1"));
    }
    check_positive("L", lipschitz)?;
    if !(delta_f0 >= 0.0 && delta_f0.is_finite()) {
        return Err(Error::config(format!("Delta_f0 must be non-negative, got {delta_f0}")));
    }
    let raw = Real::from_f64(lipschitz)
        .mul_f(160.0)
        .mul(&Real::from_f64(delta_f0).add_f(1.0))
        .div(&Real::from_u64(n as u64).sqrt().mul(&Real::from_f64(eps).sq()));
    Ok((raw.ceil_u64("T5")?, raw.to_f64()))
}

/// Thresholds past which `1/(T² ∧ √n T) ≤ ε²` (`t_plain`) and
/// `ln T/(T² ∧ √n T) ≤ ε²` (`t_log`) hold. The log variant needs
/// `ε ≤ 1/e` and is `None` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationThresholds {
    pub t_plain: u64,
    pub t_log: Option<u64>,
}

pub fn iteration_thresholds(eps: f64, n: usize) -> Result<IterationThresholds> {
    check_positive("eps", eps)?;
    if n == 0 {
        return Err(Error::config("sample count n must be at least 1"));
    }
    let rn = (n as f64).sqrt();
    let eps2 = eps * eps;
    let plain = 1.0 / eps + 1.0 / (rn * eps2);
    let inner = 1.0 / (rn * eps2) * (1.0 / eps2).ln();
    let indicator = if inner <= std::f64::consts::E / 6.0 { 1.0 } else { 0.0 };
    let log = 3.0 * (1.0 / eps * (1.0 / eps).ln() + 2.0 * inner + indicator);
    Ok(IterationThresholds {
        t_plain: ceil_u64(plain, "t_plain")?,
        t_log: if eps <= 1.0 / std::f64::consts::E {
            Some(ceil_u64(log, "t_log")?)
        } else {
            None
        },
    })
}

fn min_denominator(t: u64, n: usize) -> f64 {
    let t = t as f64;
    (t * t).min((n as f64).sqrt() * t)
}

/// `1/(T² ∧ √n T) ≤ ε²`.
pub fn plain_threshold_holds(t: u64, eps: f64, n: usize) -> bool {
    t >= 1 && 1.0 / min_denominator(t, n) <= eps * eps
}

/// `ln T/(T² ∧ √n T) ≤ ε²`.
pub fn log_threshold_holds(t: u64, eps: f64, n: usize) -> bool {
    t >= 1 && (t as f64).ln() / min_denominator(t, n) <= eps * eps
}
