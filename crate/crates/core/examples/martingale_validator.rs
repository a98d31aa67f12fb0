//! Monte-Carlo check of the Azuma-Hoeffding bound for vector martingales
//! whose increment bounds are themselves random. Reports the violation
//! frequency and its Wilson interval for each increment family.
//!
//!     cargo run --release --example martingale_validator -- [trials]

use prob_sarah::concentration::{validate_mah, MartingaleFamily, MartingaleTrialConfig};

fn main() -> prob_sarah::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let families = [
        MartingaleFamily::UniformSphere,
        MartingaleFamily::Rademacher,
        MartingaleFamily::StateDependent { c: 0.3, r_max: 2.0 },
        MartingaleFamily::AdversarialStopping { ratio: 0.5 },
    ];
    for family in families {
        for dim in [2, 20, 200] {
            let mut cfg = MartingaleTrialConfig {
                dim,
                len: 100,
                family,
                radius: 1.0,
                delta: 0.05,
                big_b: 101.0,
                small_b: 1.0,
                trials,
                seed: 7,
            };
            if let MartingaleFamily::StateDependent { r_max, .. } = family {
                // Σ r_k² can reach len·r_max²; widen the bracket to match
                cfg.big_b = 1.0 + cfg.len as f64 * r_max * r_max;
            }
            let report = validate_mah(&cfg)?;
            println!(
                "{family:?} d={dim:>3} factor {:.2}: {}",
                cfg.bound_factor(),
                report.summary()
            );
        }
    }
    Ok(())
}
