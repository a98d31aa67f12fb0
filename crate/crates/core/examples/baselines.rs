//! SGD, SVRG and SCSG next to practical-schedule Prob-SARAH on the bundled
//! mushrooms data, each for the same number of epochs. Prints the squared
//! gradient norm at every epoch boundary for one seed.
//!
//!     cargo run --release --example baselines -- [epochs] [seed]

use std::sync::Arc;

use prob_sarah::data::{read_libsvm, ParseOptions};
use prob_sarah::harness::baseline_matching;
use prob_sarah::objective::{FiniteSum, LogisticRegression, Regularizer};
use prob_sarah::optimizer::{prob_sarah, scsg, sgd, svrg, BaselineConfig, RunConfig, RunTrace, StepSize};
use prob_sarah::schedule::{ScheduleInputs, Setting};

fn row(name: &str, t: &RunTrace) {
    let g: Vec<String> = t.snapshots.iter().map(|s| format!("{:.2e}", s.grad_sq)).collect();
    println!("{name:>10} ({:>8} IFO): {}", t.ifo, g.join(" "));
}

fn main() -> prob_sarah::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mushrooms.libsvm");
    let data = Arc::new(read_libsvm(&path, ParseOptions::default())?);
    let f = LogisticRegression::new(data, 0.1, Regularizer::RationalSquare, 50.0)?;
    let c = f.constants();
    let (eps, delta, step) = (0.01, 0.1, 0.01);

    let inputs = ScheduleInputs {
        n: f.n_samples(),
        eps,
        delta,
        lipschitz: c.lipschitz,
        alpha_m: c.alpha_m,
        diameter: c.diameter(),
    };
    let batch = baseline_matching(&inputs, epochs, Setting::Practical)?;
    println!("n = {}, matched baseline batch {batch}", f.n_samples());

    let mut cfg = RunConfig::new(Setting::Practical, eps, delta, seed);
    cfg.step = StepSize::Fixed(step);
    cfg.epoch_budget = Some(epochs as f64);
    cfg.snapshots = true;
    cfg.continue_after_stop = true;
    row("prob_sarah", &prob_sarah(&f, &cfg)?);

    let base = BaselineConfig {
        step,
        batch,
        epochs: epochs as f64,
        seed,
        x0: None,
        snapshots: true,
    };
    row("sgd", &sgd(&f, &base)?);
    row("svrg", &svrg(&f, &base, None)?);
    row("scsg", &scsg(&f, &base, (8 * batch).min(f.n_samples()))?);
    Ok(())
}
