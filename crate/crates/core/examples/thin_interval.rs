//! Thin a sampled Poisson process on `[0, 1]` from intensity 2 down to 1.
//! The map is a pure function of the input points: no auxiliary
//! randomness, output always a subset of the input.
//!
//! Run: `cargo run --example thin_interval`

use poisson_thin::thin;
use poisson_thin::verify::{rng::Stream, sample_process};

fn main() -> poisson_thin::Result<()> {
    let (lambda, mu) = (2.0, 1.0);
    let mut mean_in = 0.0;
    let mut mean_out = 0.0;
    let mut shown = false;
    let trials = 20_000;
    for trial in 0..trials {
        let mut stream = Stream::new(42, trial);
        let input = sample_process(lambda, 1.0, &mut stream)?;
        let output = thin::thin_unit(&input, lambda, mu)?;
        assert!(output.is_subset_of(&input));
        mean_in += input.len() as f64 / trials as f64;
        mean_out += output.len() as f64 / trials as f64;

        if !shown && input.len() >= 3 {
            println!("trial {trial} input:  {:?}", positions(&input));
            println!("trial {trial} output: {:?}", positions(&output));
            shown = true;
        }
    }
    println!("over {trials} trials: mean input count {mean_in:.3}, mean output count {mean_out:.3}");
    println!("targets: {lambda} and {mu}");
    Ok(())
}

fn positions(s: &poisson_thin::point::PointSet) -> Vec<f64> {
    s.iter().map(|p| (p.to_f64() * 1000.0).round() / 1000.0).collect()
}
