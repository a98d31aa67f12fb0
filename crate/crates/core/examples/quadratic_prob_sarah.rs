//! Prob-SARAH (setting A) on the synthetic non-convex quadratic benchmark,
//! with the estimator-error monitor attached to every run.
//!
//!     cargo run --release --example quadratic_prob_sarah -- [runs] [seed]

use std::time::Instant;

use prob_sarah::bounds::stop_bounds_a;
use prob_sarah::concentration::OmegaMonitor;
use prob_sarah::harness::{build_problem, ProblemSpec};
use prob_sarah::optimizer::{prob_sarah_observed, RunConfig};
use prob_sarah::rng::{derive_seed, label_of};
use prob_sarah::schedule::Setting;

fn main() -> prob_sarah::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let (eps, delta) = (0.3, 0.1);

    let problem = build_problem(&ProblemSpec::nonconvex_quadratic(1), false)?;
    let f = problem.objective.as_ref();
    let c = f.constants();
    let delta_f = problem.delta_f_bound.expect("closed form for quadratics");
    let bounds = stop_bounds_a(eps, delta, f.n_samples(), c.lipschitz, delta_f, c.alpha_m)?;
    println!(
        "n = {}, d = {}, L = {:.4}, alpha_M = {:.4}, Delta_f <= {:.4}, outer cap = {}",
        f.n_samples(),
        f.dim(),
        c.lipschitz,
        c.alpha_m,
        delta_f,
        bounds.outer_cap
    );

    let start = Instant::now();
    let (mut success, mut stopped, mut omega, mut worst) = (0, 0, 0, 0.0f64);
    let mut outers = Vec::new();
    for r in 0..runs {
        let mut cfg = RunConfig::new(
            Setting::A,
            eps,
            delta,
            derive_seed(seed, &[label_of("prob_sarah_a"), r]),
        );
        cfg.delta_f = Some(delta_f);
        let mut monitor = OmegaMonitor::new(f);
        let trace = prob_sarah_observed(f, &cfg, &mut monitor)?;
        let report = monitor.into_report();
        omega += report.any_violation() as u32;
        worst = worst.max(report.max_ratio);
        if let Some(s) = &trace.stop {
            stopped += 1;
            success += (s.grad_sq <= eps * eps) as u32;
            outers.push(s.outer);
        }
    }
    outers.sort_unstable();
    println!(
        "{runs} runs in {:.1?}: {stopped} stopped, {success} with |grad f(x_hat)|^2 <= eps^2",
        start.elapsed()
    );
    if let (Some(lo), Some(hi)) = (outers.first(), outers.last()) {
        println!(
            "stopping outer iteration: min {lo}, median {}, max {hi}",
            outers[outers.len() / 2]
        );
    }
    println!("runs with an estimator-error bound violation: {omega} (largest error/bound ratio {worst:.3e})");
    Ok(())
}
