//! Finite-sum objectives `f(x) = (1/n) Σ f_i(x)` over the ball
//! `D = {x : ‖x‖ ≤ R}`.
//!
//! [`FiniteSum`] is the oracle every optimizer talks to. Its gradient methods
//! *accumulate* into a caller-owned buffer so the hot loops never allocate.
//! Two concrete families are provided:
//!
//! - [`LogisticRegression`]: `log(1 + exp(−y wᵀx)) + λ·Φ(x)` on a sparse
//!   [`Dataset`], where `Φ` is a [`Regularizer`] (with its ½ factor).
//! - [`QuadraticObjective`]: `(μ/2)‖x − a_i‖² + λ·Φ(x)` with synthetic
//!   centres; with `λ > 4μ` and the rational-square penalty it is non-convex.
//!
//! Sample indices are 0-based throughout.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::linalg::{axpy, dist_sq, norm, norm_sq};
use crate::{Error, Result};

/// Smoothness constant `L`, gradient bound `α_M` and the radius of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub lipschitz: f64,
    pub alpha_m: f64,
    pub radius: f64,
}

impl ProblemConstants {
    /// `d₁ = 2R`, the diameter of `D`.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.lipschitz > 0.0 && self.lipschitz.is_finite()) {
            return Err(Error::config(format!(
                "smoothness constant L must be positive, got {}",
                self.lipschitz
            )));
        }
        if !(self.alpha_m > 0.0 && self.alpha_m.is_finite()) {
            return Err(Error::config(format!(
                "gradient bound alpha_M must be positive, got {}",
                self.alpha_m
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::config(format!("radius must be positive, got {}", self.radius)));
        }
        if self.diameter() < 1.0 {
            return Err(Error::config(format!(
                "domain diameter 2R = {} is below 1",
                self.diameter()
            )));
        }
        Ok(())
    }
}

/// Incremental first-order oracle for a finite sum.
pub trait FiniteSum: Send + Sync {
    fn n_samples(&self) -> usize;

    fn dim(&self) -> usize;

    fn constants(&self) -> ProblemConstants;

    fn sample_loss(&self, i: usize, x: &[f64]) -> f64;

    /// `out += weight · ∇f_i(x)`. One IFO call.
    fn add_sample_gradient(&self, i: usize, x: &[f64], weight: f64, out: &mut [f64]);

    /// `out += weight · Σ_{i ∈ batch} ∇f_i(x)`. `batch.len()` IFO calls;
    /// repeated indices count (and contribute) once per occurrence.
    fn add_batch_gradient(&self, batch: &[usize], x: &[f64], weight: f64, out: &mut [f64]) {
        for &i in batch {
            self.add_sample_gradient(i, x, weight, out);
        }
    }

    fn loss(&self, x: &[f64]) -> f64 {
        let n = self.n_samples();
        (0..n).map(|i| self.sample_loss(i, x)).sum::<f64>() / n as f64
    }

    /// Exact `∇f(x)`. Meant for monitoring and evaluation only; wrappers that
    /// count IFO calls do not charge it.
    fn full_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n_samples();
        let mut g = vec![0.0; self.dim()];
        for i in 0..n {
            self.add_sample_gradient(i, x, 1.0, &mut g);
        }
        crate::linalg::scale(1.0 / n as f64, &mut g);
        g
    }
}

impl<T: FiniteSum + ?Sized> FiniteSum for &T {
    fn n_samples(&self) -> usize {
        (**self).n_samples()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn constants(&self) -> ProblemConstants {
        (**self).constants()
    }
    fn sample_loss(&self, i: usize, x: &[f64]) -> f64 {
        (**self).sample_loss(i, x)
    }
    fn add_sample_gradient(&self, i: usize, x: &[f64], weight: f64, out: &mut [f64]) {
        (**self).add_sample_gradient(i, x, weight, out)
    }
    fn add_batch_gradient(&self, batch: &[usize], x: &[f64], weight: f64, out: &mut [f64]) {
        (**self).add_batch_gradient(batch, x, weight, out)
    }
    fn loss(&self, x: &[f64]) -> f64 {
        (**self).loss(x)
    }
    fn full_gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).full_gradient(x)
    }
}

fn check_dim<F: FiniteSum + ?Sized>(f: &F, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Checked `f(x)`.
pub fn loss<F: FiniteSum + ?Sized>(f: &F, x: &[f64]) -> Result<f64> {
    check_dim(f, x)?;
    Ok(f.loss(x))
}

/// Checked `∇f_i(x)` as a fresh vector.
pub fn sample_gradient<F: FiniteSum + ?Sized>(f: &F, i: usize, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(f, x)?;
    if i >= f.n_samples() {
        return Err(Error::SampleIndex {
            index: i,
            n: f.n_samples(),
        });
    }
    let mut g = vec![0.0; f.dim()];
    f.add_sample_gradient(i, x, 1.0, &mut g);
    Ok(g)
}

/// Checked `∇f(x)`.
pub fn full_gradient<F: FiniteSum + ?Sized>(f: &F, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(f, x)?;
    Ok(f.full_gradient(x))
}

/// Euclidean projection onto `{x : ‖x‖ ≤ radius}`, in place.
pub fn project_in_place(x: &mut [f64], radius: f64) {
    let nrm = norm(x);
    if nrm > radius {
        let orig = x.to_vec();
        let mut s = radius / nrm;
        loop {
            for (v, o) in x.iter_mut().zip(&orig) {
                *v = o * s;
            }
            // rounding can leave the norm a hair above the radius; shrink
            // until the result is inside, so projecting again is a no-op
            if norm(x) <= radius {
                break;
            }
            s = s.next_down();
        }
    }
}

pub fn project(x: &[f64], radius: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    project_in_place(&mut y, radius);
    y
}

/// Coordinate-separable non-convex penalty `Φ(x) = ½ Σ_j φ(x_j)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Regularizer {
    /// `φ(t) = t² / (1 + t²)`.
    #[default]
    RationalSquare,
    /// `φ(t) = (t²)^{1/4}`. Its curvature blows up at `t = 0`; the derived
    /// `L` and `α_M` hold only on `{x : min_j |x_j| ≥ margin}`.
    FourthRoot { margin: f64 },
}

impl Regularizer {
    pub const DEFAULT_FOURTH_ROOT_MARGIN: f64 = 1e-3;

    pub fn fourth_root() -> Self {
        Regularizer::FourthRoot {
            margin: Self::DEFAULT_FOURTH_ROOT_MARGIN,
        }
    }

    /// `Φ(x)`, including the ½ factor.
    pub fn value(&self, x: &[f64]) -> f64 {
        let s: f64 = match self {
            Regularizer::RationalSquare => x.iter().map(|&t| t * t / (1.0 + t * t)).sum(),
            Regularizer::FourthRoot { .. } => x.iter().map(|&t| t.abs().sqrt()).sum(),
        };
        0.5 * s
    }

    /// `out += weight · ∇Φ(x)`. At `t = 0` the fourth-root term uses the
    /// zero subgradient.
    pub fn add_gradient(&self, x: &[f64], weight: f64, out: &mut [f64]) {
        match self {
            Regularizer::RationalSquare => {
                for (o, &t) in out.iter_mut().zip(x) {
                    let den = 1.0 + t * t;
                    *o += weight * t / (den * den);
                }
            }
            Regularizer::FourthRoot { .. } => {
                for (o, &t) in out.iter_mut().zip(x) {
                    if t != 0.0 {
                        *o += weight * t.signum() / (4.0 * t.abs().sqrt());
                    }
                }
            }
        }
    }

    /// Bound on `‖∇²Φ‖` (coordinate-wise `½ sup |φ''|`).
    pub fn curvature_bound(&self) -> f64 {
        match *self {
            // φ'' = 2(1 − 3t²)/(1 + t²)³ peaks at t = 0 with value 2
            Regularizer::RationalSquare => 1.0,
            // ½ |φ''| = |t|^{-3/2} / 8
            Regularizer::FourthRoot { margin } => margin.powf(-1.5) / 8.0,
        }
    }

    /// Bound on `‖∇Φ(x)‖` over the ball of the given radius in `dim`
    /// dimensions.
    pub fn gradient_bound(&self, dim: usize) -> f64 {
        let rd = (dim as f64).sqrt();
        match *self {
            // t/(1+t²)² peaks at t² = 1/3
            Regularizer::RationalSquare => 3.0 * 3f64.sqrt() / 16.0 * rd,
            Regularizer::FourthRoot { margin } => rd / (4.0 * margin.sqrt()),
        }
    }

    /// Upper bound on `Φ` over the ball of the given radius.
    pub fn value_bound(&self, dim: usize, radius: f64) -> f64 {
        match self {
            Regularizer::RationalSquare => 0.5 * dim as f64,
            Regularizer::FourthRoot { .. } => 0.5 * dim as f64 * radius.sqrt(),
        }
    }
}

/// `(L, α_M)` for logistic regression with penalty `λ·Φ` on the ball of
/// radius `radius`:
///
/// `L = max_i ‖w_i‖² / 4 + λ·c_Φ`, `α_M = max_i ‖w_i‖ + λ·g_Φ`.
pub fn derive_constants(ds: &Dataset, lambda: f64, radius: f64, regularizer: Regularizer) -> (f64, f64) {
    let _ = radius; // both penalty bounds are uniform in x
    let w = ds.max_row_norm();
    let l = w * w / 4.0 + lambda * regularizer.curvature_bound();
    let alpha = w + lambda * regularizer.gradient_bound(ds.dim());
    (l, alpha)
}

#[inline]
fn softplus(z: f64) -> f64 {
    // log(1 + e^z) without overflow
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Non-convex-regularized logistic regression on a sparse dataset.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    data: Arc<Dataset>,
    lambda: f64,
    regularizer: Regularizer,
    constants: ProblemConstants,
}

impl LogisticRegression {
    /// Derives `L` and `α_M` and validates the domain (`R > 0`, `2R ≥ 1`).
    pub fn new(data: Arc<Dataset>, lambda: f64, regularizer: Regularizer, radius: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!("lambda must be non-negative, got {lambda}")));
        }
        if let Regularizer::FourthRoot { margin } = regularizer {
            if !(margin > 0.0) {
                return Err(Error::config("fourth-root margin must be positive"));
            }
        }
        let (lipschitz, alpha_m) = derive_constants(&data, lambda, radius, regularizer);
        let constants = ProblemConstants {
            lipschitz,
            alpha_m,
            radius,
        };
        constants.validate()?;
        Ok(Self {
            data,
            lambda,
            regularizer,
            constants,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn regularizer(&self) -> Regularizer {
        self.regularizer
    }

    #[inline]
    fn margin(&self, i: usize, x: &[f64]) -> f64 {
        self.data.label(i) * self.data.row(i).dot(x)
    }

    #[inline]
    fn add_data_gradient(&self, i: usize, x: &[f64], weight: f64, out: &mut [f64]) {
        let y = self.data.label(i);
        let m = y * self.data.row(i).dot(x);
        // −y w / (1 + e^{y wᵀx})
        let coef = -y * sigmoid(-m);
        self.data.row(i).add_scaled_to(weight * coef, out);
    }
}

impl FiniteSum for LogisticRegression {
    fn n_samples(&self) -> usize {
        self.data.n()
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn constants(&self) -> ProblemConstants {
        self.constants
    }

    fn sample_loss(&self, i: usize, x: &[f64]) -> f64 {
        softplus(-self.margin(i, x)) + self.lambda * self.regularizer.value(x)
    }

    fn add_sample_gradient(&self, i: usize, x: &[f64], weight: f64, out: &mut [f64]) {
        self.add_data_gradient(i, x, weight, out);
        if self.lambda != 0.0 {
            self.regularizer.add_gradient(x, weight * self.lambda, out);
        }
    }

    fn add_batch_gradient(&self, batch: &[usize], x: &[f64], weight: f64, out: &mut [f64]) {
        for &i in batch {
            self.add_data_gradient(i, x, weight, out);
        }
        if self.lambda != 0.0 && !batch.is_empty() {
            self.regularizer
                .add_gradient(x, weight * self.lambda * batch.len() as f64, out);
        }
    }

    fn loss(&self, x: &[f64]) -> f64 {
        let n = self.n_samples();
        let data: f64 = (0..n).map(|i| softplus(-self.margin(i, x))).sum::<f64>() / n as f64;
        data + self.lambda * self.regularizer.value(x)
    }

    fn full_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n_samples();
        let mut g = vec![0.0; self.dim()];
        let w = 1.0 / n as f64;
        for i in 0..n {
            self.add_data_gradient(i, x, w, &mut g);
        }
        if self.lambda != 0.0 {
            self.regularizer.add_gradient(x, self.lambda, &mut g);
        }
        g
    }
}

/// Synthetic `f_i(x) = (μ/2)‖x − a_i‖² + λ·Φ(x)`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    centers: Vec<Vec<f64>>,
    curvature: f64,
    lambda: f64,
    regularizer: Regularizer,
    constants: ProblemConstants,
}

impl QuadraticObjective {
    pub fn new(
        centers: Vec<Vec<f64>>,
        curvature: f64,
        lambda: f64,
        regularizer: Regularizer,
        radius: f64,
    ) -> Result<Self> {
        let dim = centers.first().map(Vec::len).unwrap_or(0);
        if centers.is_empty() || dim == 0 {
            return Err(Error::config("quadratic objective needs at least one non-empty centre"));
        }
        if centers.iter().any(|c| c.len() != dim) {
            return Err(Error::config("all centres must share one dimension"));
        }
        if !(curvature >= 0.0) || !(lambda >= 0.0) {
            return Err(Error::config("curvature and lambda must be non-negative"));
        }
        let max_center = centers.iter().map(|c| norm(c)).fold(0.0, f64::max);
        let constants = ProblemConstants {
            lipschitz: curvature + lambda * regularizer.curvature_bound(),
            alpha_m: curvature * (radius + max_center) + lambda * regularizer.gradient_bound(dim),
            radius,
        };
        constants.validate()?;
        Ok(Self {
            centers,
            curvature,
            lambda,
            regularizer,
            constants,
        })
    }

    /// `n` centres `a_i = offset·1/√d + u_i` with `u_i` uniform in the ball of
    /// radius `spread`.
    #[allow(clippy::too_many_arguments)]
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        dim: usize,
        offset: f64,
        spread: f64,
        curvature: f64,
        lambda: f64,
        radius: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let shift = offset / (dim as f64).sqrt();
        let centers = (0..n)
            .map(|_| {
                let mut u = uniform_in_ball(dim, spread, rng);
                u.iter_mut().for_each(|v| *v += shift);
                u
            })
            .collect();
        Self::new(centers, curvature, lambda, Regularizer::RationalSquare, radius)
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn mean_center(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for c in &self.centers {
            axpy(1.0, c, &mut m);
        }
        crate::linalg::scale(1.0 / self.centers.len() as f64, &mut m);
        m
    }

    /// A closed-form `Δ_f ≥ sup_D f − inf_D f`. Exact when `λ = 0` and the
    /// mean centre lies in `D`.
    pub fn delta_f_bound(&self) -> f64 {
        let r = self.constants.radius + norm(&self.mean_center());
        0.5 * self.curvature * r * r + self.lambda * self.regularizer.value_bound(self.dim(), self.constants.radius)
    }
}

impl FiniteSum for QuadraticObjective {
    fn n_samples(&self) -> usize {
        self.centers.len()
    }

    fn dim(&self) -> usize {
        self.centers[0].len()
    }

    fn constants(&self) -> ProblemConstants {
        self.constants
    }

    fn sample_loss(&self, i: usize, x: &[f64]) -> f64 {
        0.5 * self.curvature * dist_sq(x, &self.centers[i]) + self.lambda * self.regularizer.value(x)
    }

    fn add_sample_gradient(&self, i: usize, x: &[f64], weight: f64, out: &mut [f64]) {
        let c = &self.centers[i];
        let s = weight * self.curvature;
        for ((o, &xv), &cv) in out.iter_mut().zip(x).zip(c) {
            *o += s * (xv - cv);
        }
        if self.lambda != 0.0 {
            self.regularizer.add_gradient(x, weight * self.lambda, out);
        }
    }
}

/// Uniform draw from the `dim`-ball of the given radius.
pub fn uniform_in_ball<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    let mut v = uniform_on_sphere(dim, rng);
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    v.iter_mut().for_each(|x| *x *= r);
    v
}

/// Uniform draw from the unit sphere `S^{dim−1}`.
pub fn uniform_on_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n2 = norm_sq(&v);
        if n2 > 0.0 {
            let inv = 1.0 / n2.sqrt();
            return v.into_iter().map(|x| x * inv).collect();
        }
    }
}

/// Counts IFO calls made through it. Loss and full-gradient evaluations are
/// forwarded without being charged.
#[derive(Debug)]
pub struct CountingOracle<F> {
    inner: F,
    calls: AtomicU64,
}

impl<F: FiniteSum> CountingOracle<F> {
    pub fn new(inner: F) -> Self {
        Self {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> F {
        self.inner
    }
}

impl<F: FiniteSum> FiniteSum for CountingOracle<F> {
    fn n_samples(&self) -> usize {
        self.inner.n_samples()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn constants(&self) -> ProblemConstants {
        self.inner.constants()
    }
    fn sample_loss(&self, i: usize, x: &[f64]) -> f64 {
        self.inner.sample_loss(i, x)
    }
    fn add_sample_gradient(&self, i: usize, x: &[f64], weight: f64, out: &mut [f64]) {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.add_sample_gradient(i, x, weight, out)
    }
    fn add_batch_gradient(&self, batch: &[usize], x: &[f64], weight: f64, out: &mut [f64]) {
        self.calls.fetch_add(batch.len() as u64, Ordering::Relaxed);
        self.inner.add_batch_gradient(batch, x, weight, out)
    }
    fn loss(&self, x: &[f64]) -> f64 {
        self.inner.loss(x)
    }
    fn full_gradient(&self, x: &[f64]) -> Vec<f64> {
        self.inner.full_gradient(x)
    }
}
