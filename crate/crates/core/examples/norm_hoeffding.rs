//! Deviation of a without-replacement subsample mean from the population
//! mean, against the norm-Hoeffding tail bound, over a grid of thresholds
//! and subsample sizes.
//!
//!     cargo run --release --example norm_hoeffding -- [trials]

use prob_sarah::concentration::{norm_hoeffding_bound, validate_norm_hoeffding};
use prob_sarah::objective::uniform_in_ball;
use prob_sarah::rng::stream;

fn main() -> prob_sarah::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let mut rng = stream(3);
    let vectors: Vec<Vec<f64>> = (0..200).map(|_| uniform_in_ball(10, 1.0, &mut rng)).collect();
    for k in [10, 20, 50, 100] {
        // only thresholds where the bound says something
        let t_min = (64.0 * 3f64.ln() / k as f64).sqrt();
        let grid: Vec<f64> = [0.05, 0.1, 0.25, 0.5]
            .iter()
            .map(|s| t_min + s)
            .filter(|&t| t <= 2.0)
            .collect();
        let report = validate_norm_hoeffding(&vectors, 1.0, k, &grid, trials, 11)?;
        println!(
            "k = {k}: E|dev|^2 = {:.3e} (bound {:.3e})",
            report.mean_sq, report.mean_sq_bound
        );
        for th in &report.thresholds {
            println!(
                "   t = {:.3}: tail {:.3e}, bound {:.3e} (recomputed {:.3e})",
                th.t,
                th.report.frequency,
                th.bound,
                norm_hoeffding_bound(k, th.t, 1.0)
            );
        }
    }
    Ok(())
}
