//! Trace the critical intensity `lambda_c(mu)`: the smallest input
//! intensity from which thinning down to `mu` is possible on unit volume.
//! The excess `lambda_c(mu) - mu` never exceeds 1 and approaches 1 from
//! below as `mu` grows.
//!
//! Run: `cargo run --example critical_curve`

use poisson_thin::poisson;

fn main() -> poisson_thin::Result<()> {
    println!("{:>8} {:>12} {:>10}", "mu", "lambda_c", "excess");
    for mu in [0.01, 0.1, 0.5, 0.7, 1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0] {
        let lc = poisson::lambda_c(mu, 1.0, 1e-9)?;
        println!("{mu:>8} {lc:>12.6} {:>10.6}", lc - mu);
        assert!(lc > mu && lc <= mu + 1.0);
    }
    Ok(())
}
