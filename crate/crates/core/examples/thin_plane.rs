//! Thin a point set in a two-dimensional box. Coordinates are rescaled to
//! box-relative fractions and bit-interleaved into a single unit-interval
//! point, thinned there, and survivors keep their original coordinates.
//!
//! Run: `cargo run --example thin_plane`

use poisson_thin::point::BoxSpec;
use poisson_thin::point::EuclideanPointSet;
use poisson_thin::thin;

fn main() -> poisson_thin::Result<()> {
    let bx = BoxSpec::new(vec![0.0, 0.0], vec![2.0, 1.0])?;
    // a fixed 12-point configuration in the 2 x 1 box
    let pts: Vec<Vec<f64>> = (0..12)
        .map(|i| {
            let t = 0.13 * (i + 1) as f64;
            vec![2.0 * (t % 1.0).max(0.01), ((t * 2.7) % 1.0).max(0.01)]
        })
        .collect();
    let input = EuclideanPointSet::from_absolute(&pts, &bx)?;

    // effective means fold the volume: (1.0 * 2, 0.4 * 2) = (2.0, 0.8)
    let output = thin::thin_box(&input, &bx, 1.0, 0.4)?;
    println!("input  ({} points):", input.len());
    for p in input.absolute(&bx) {
        println!("  ({:.3}, {:.3})", p[0], p[1]);
    }
    println!("output ({} points):", output.len());
    for p in output.absolute(&bx) {
        println!("  ({:.3}, {:.3})", p[0], p[1]);
    }
    // survivors carry their exact original coordinates
    for fr in output.fractions() {
        assert!(input.fractions().contains(fr));
    }
    Ok(())
}
