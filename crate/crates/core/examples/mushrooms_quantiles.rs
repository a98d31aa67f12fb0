//! Quantile-of-gradient-norm comparison on the bundled mushrooms data:
//! Prob-SARAH against SGD, SVRG and SCSG with step size 0.01.
//!
//!     cargo run --release --example mushrooms_quantiles -- [out_dir]
//!
//! Writes `quantiles.csv` and `summary.json` and prints the 0.9-quantile
//! trajectories.

use std::path::{Path, PathBuf};
use std::time::Instant;

use prob_sarah::harness::{emit_csv, run_experiment, ExperimentConfig, Overrides};

fn main() -> prob_sarah::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "out/mushrooms".into());
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/mushrooms.json");
    let mut cfg = ExperimentConfig::from_file(&config)?;
    cfg.apply(&Overrides {
        output_dir: Some(out.clone()),
        ..Overrides::default()
    });

    let start = Instant::now();
    let report = run_experiment(&cfg)?;
    emit_csv(&report, &out)?;
    println!(
        "n = {}, d = {}, L = {:.3}, alpha_M = {:.3} ({:.1?})",
        report.manifest.n,
        report.manifest.dim,
        report.manifest.constants.lipschitz,
        report.manifest.constants.alpha_m,
        start.elapsed()
    );
    for a in &report.algorithms {
        let traj: Vec<String> = a.trajectory.iter().map(|r| format!("{:.2e}", r.grad_norm_sq)).collect();
        println!("{:>22}: {}", a.name, traj.join(" "));
    }
    println!("wrote {}", out.display());
    Ok(())
}
