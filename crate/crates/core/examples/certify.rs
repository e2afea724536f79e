//! Run a reduced Monte Carlo certification suite and print the report:
//! output-count chi-square, conditional-uniformity KS, exact subset /
//! determinism checks, and the small-n deletion oracles.
//!
//! Run: `cargo run --release --example certify`

use poisson_thin::verify::{self, TrialConfig, Variant};

fn main() -> poisson_thin::Result<()> {
    let config = TrialConfig {
        trials: 20_000, // the shipped headline config uses 100_000
        seed: 2024,
        lambda: 2.0,
        mu: 1.0,
        volume: 1.0,
        variant: Variant::Unit,
        significance: 0.01,
    };
    let report = verify::certify(&config)?;
    for t in &report.tests {
        match t.p_value {
            Some(p) => println!(
                "{:32} stat {:>10.4}  p {:.4}  {}",
                t.name,
                t.statistic,
                p,
                if t.pass { "pass" } else { "FAIL" }
            ),
            None => println!(
                "{:32} stat {:>10.4}  exact   {}",
                t.name,
                t.statistic,
                if t.pass { "pass" } else { "FAIL" }
            ),
        }
    }
    println!("overall: {}", if report.overall_pass { "PASS" } else { "FAIL" });
    Ok(())
}
