//! Worst-case outer-iteration bounds for a few accuracy targets, and the
//! iteration thresholds past which the step-count inequalities hold.
//!
//!     cargo run --release --example stop_bounds

use prob_sarah::bounds::{iteration_thresholds, stop_bound_b, stop_bounds_a};

fn main() -> prob_sarah::Result<()> {
    let (delta, lipschitz, alpha, delta_f) = (0.1, 1.0, 1.0, 1.0);
    println!(
        "{:>6} {:>8} {:>10} {:>12} {:>8} {:>8} {:>12} {:>8} {:>7} {:>7}",
        "eps", "n", "T1", "T2", "T3", "T4", "outer_cap", "T5", "t_plain", "t_log"
    );
    for n in [100, 10_000, 1_000_000] {
        for eps in [0.3, 0.1, 0.03] {
            let a = stop_bounds_a(eps, delta, n, lipschitz, delta_f, alpha)?;
            let (t5, _) = stop_bound_b(eps, n, lipschitz, delta_f)?;
            let th = iteration_thresholds(eps, n)?;
            println!(
                "{eps:>6} {n:>8} {:>10} {:>12} {:>8} {:>8} {:>12} {t5:>8} {:>7} {:>7}",
                a.t1,
                a.t2,
                a.t3,
                a.t4,
                a.outer_cap,
                th.t_plain,
                th.t_log.map_or("-".to_string(), |t| t.to_string())
            );
        }
    }
    Ok(())
}
