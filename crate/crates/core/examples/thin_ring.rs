//! Rotation-equivariant thinning on the circle: rotating the input rotates
//! the output, bit-exactly. The deleted point is found by the gas-station
//! rule (the unique point from which a full circuit with fuel 1/n per stop
//! succeeds), which commutes with rotations by construction.
//!
//! Run: `cargo run --example thin_ring`

use poisson_thin::point::{CirclePoint, CirclePointSet};
use poisson_thin::thin;
use poisson_thin::verify::rng::Stream;

fn main() -> poisson_thin::Result<()> {
    let mut stream = Stream::new(11, 0);
    let pts: Vec<CirclePoint> = (0..7).map(|_| CirclePoint(stream.next_u128())).collect();
    let input = CirclePointSet::new(pts)?;

    let out = thin::thin_circle(&input, 2.0, 1.0)?;
    println!("input angles (turns):  {:?}", angles(&input));
    println!("output angles (turns): {:?}", angles(&out.kept));
    assert!(out.kept.is_subset_of(&input));

    // equivariance, checked for ten random rotations
    for _ in 0..10 {
        let theta = CirclePoint(stream.next_u128());
        let rotated = thin::thin_circle(&input.rotate(theta), 2.0, 1.0)?;
        assert_eq!(rotated.kept, out.kept.rotate(theta));
    }
    println!("thin(rotate(s)) == rotate(thin(s)) for 10 random rotations");
    Ok(())
}

fn angles(s: &CirclePointSet) -> Vec<f64> {
    s.points()
        .iter()
        .map(|p| (p.to_f64() * 1000.0).round() / 1000.0)
        .collect()
}
