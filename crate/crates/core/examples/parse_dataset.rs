//! Parse a LIBSVM file and print its shape, label balance and the derived
//! smoothness and gradient-bound constants of the regularized logistic loss.
//!
//!     cargo run --release --example parse_dataset -- [path] [lambda]

use std::path::PathBuf;

use prob_sarah::data::{read_libsvm, ParseOptions};
use prob_sarah::objective::{derive_constants, Regularizer};

fn main() -> prob_sarah::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/mushrooms.libsvm"));
    let lambda: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.1);

    let ds = read_libsvm(&path, ParseOptions::default())?;
    let positives = ds.labels().iter().filter(|&&y| y > 0.0).count();
    println!(
        "{}: n = {}, d = {}, nnz = {}",
        path.display(),
        ds.n(),
        ds.dim(),
        ds.nnz()
    );
    println!("labels: {positives} positive, {} negative", ds.n() - positives);
    println!("largest row norm {:.4}", ds.max_row_norm());

    for (name, data) in [("raw", ds.clone()), ("row-normalized", ds.normalize_rows())] {
        for reg in [Regularizer::RationalSquare, Regularizer::fourth_root()] {
            let (l, alpha) = derive_constants(&data, lambda, 50.0, reg);
            println!("{name:>15} {reg:?}: L = {l:.4}, alpha_M = {alpha:.4}");
        }
    }
    Ok(())
}
