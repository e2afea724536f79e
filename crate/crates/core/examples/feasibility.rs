//! Decide whether a deterministic thinning exists for a few intensity
//! pairs, and show the witnessing (or blocking) integer.
//!
//! Run: `cargo run --example feasibility`

use poisson_thin::{poisson, IntensityPair};

fn main() -> poisson_thin::Result<()> {
    let pairs = [
        (1.45, 0.7, 1.0),
        (1.45, 0.6, 1.0),
        (2.0, 1.0, 1.0),
        (0.725, 0.35, 2.0), // volume folds in: same as (1.45, 0.7)
        (101.0, 100.0, 1.0),
        (100.5, 100.0, 1.0),
    ];
    println!("{:>8} {:>8} {:>6} | verdict", "lambda", "mu", "volume");
    for (lambda, mu, volume) in pairs {
        let pair = IntensityPair::new(lambda, mu, volume)?;
        let w = poisson::feasible_ii(&pair)?;
        let verdict = if w.feasible {
            format!("feasible, witness k = {}", w.k.unwrap())
        } else {
            format!("no thinning exists, blocking k = {}", w.blocking_k.unwrap())
        };
        println!("{lambda:>8} {mu:>8} {volume:>6} | {verdict}");

        // the independent second evaluation always agrees on the verdict
        assert_eq!(w.feasible, poisson::feasible_iii(&pair)?.feasible);
    }
    Ok(())
}
