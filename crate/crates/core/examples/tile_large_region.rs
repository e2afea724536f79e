//! Thin a long one-dimensional region by tiling it into cubes of volume
//! `1 / (lambda - mu)`. Each cube is thinned independently — a point's fate
//! depends only on the points sharing its cube — and per-cube effective
//! means are `(mu + 1, mu)` times the cube volume, which is always feasible.
//!
//! Run: `cargo run --example tile_large_region`

use poisson_thin::point::BoxSpec;
use poisson_thin::point::EuclideanPointSet;
use poisson_thin::thin;
use poisson_thin::verify::rng::Stream;

fn main() -> poisson_thin::Result<()> {
    let (lambda, mu) = (1.5, 1.0); // cube side 1 / 0.5 = 2
    let region = BoxSpec::new(vec![0.0], vec![20.0])?;

    let mut stream = Stream::new(7, 0);
    let n = stream.next_poisson(lambda * region.volume());
    let pts: Vec<Vec<poisson_thin::point::UnitPoint>> = (0..n)
        .map(|_| vec![poisson_thin::point::UnitPoint(stream.next_u128())])
        .collect();
    let input = EuclideanPointSet::from_fractions(1, pts)?;

    let outcome = thin::tile_thin(&input, &region, lambda, mu)?;
    println!(
        "region [0, 20], tile length 2: {} occupied tiles, {} infeasible boundary tiles",
        outcome.occupied_cubes,
        outcome.infeasible_cubes.len()
    );
    println!(
        "{} points in, {} points out (target mean {})",
        input.len(),
        outcome.kept.len(),
        mu * region.volume()
    );

    // locality: per-tile survivor counts
    let mut per_tile = vec![0usize; 10];
    for fr in outcome.kept.fractions() {
        per_tile[((fr[0].to_f64() * 10.0) as usize).min(9)] += 1;
    }
    println!("survivors per tile: {per_tile:?}");
    Ok(())
}
