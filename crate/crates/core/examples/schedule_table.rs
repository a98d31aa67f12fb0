//! Per-outer-iteration batch sizes and error terms under settings A, B and
//! the practical schedule, plus the outer iteration where the second
//! stopping rule first becomes satisfiable.
//!
//!     cargo run --release --example schedule_table -- [n] [eps]

use prob_sarah::schedule::{first_second_rule_index, schedule_csv, ScheduleInputs, Setting};

fn main() -> prob_sarah::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let inputs = ScheduleInputs {
        n,
        eps,
        delta: 0.1,
        lipschitz: 1.0,
        alpha_m: 1.0,
        diameter: 100.0,
    };
    for setting in [Setting::A, Setting::B, Setting::Practical] {
        println!("# setting {setting:?}");
        print!("{}", schedule_csv(setting, &inputs, 8)?);
        match first_second_rule_index(setting, &inputs, 1_000_000)? {
            Some(j) => println!("# eps_j <= eps^2/2 first holds at j = {j}\n"),
            None => println!("# eps_j stays above eps^2/2 for j <= 10^6\n"),
        }
    }
    Ok(())
}
