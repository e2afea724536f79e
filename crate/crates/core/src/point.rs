//! Fixed-precision point types: unit-interval points, circle points, and
//! box-relative Euclidean point sets.
//!
//! A point is a 128-bit unsigned fraction: the value `raw / 2^128` in
//! `[0, 1)`. All spatial arithmetic is exact integer arithmetic on the raw
//! words, which is what makes the thinning maps bit-deterministic.

use crate::error::{Result, ThinError};
use serde::{Deserialize, Serialize};

/// A point of `[0, 1)` as a 128-bit fixed-point fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitPoint(pub u128);

impl UnitPoint {
    pub const ZERO: UnitPoint = UnitPoint(0);

    /// Nearest representable fraction at or below `x`; `x` must be in `[0, 1)`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(ThinError::Domain(format!(
                "unit point must lie in [0,1), got {x}"
            )));
        }
        // multiply by 2^128 via two 64-bit stages; clamp against rounding
        // up to 2^64 at each stage
        const TWO64: f64 = 1.8446744073709552e19;
        let y = x * TWO64;
        let hi = if y >= TWO64 { u64::MAX } else { y.floor() as u64 };
        let z = (y - hi as f64).max(0.0) * TWO64;
        let lo = if z >= TWO64 { u64::MAX } else { z.floor() as u64 };
        Ok(UnitPoint(((hi as u128) << 64) | lo as u128))
    }

    pub fn to_f64(self) -> f64 {
        (self.0 >> 64) as f64 / 1.8446744073709552e19
            + (self.0 & 0xFFFF_FFFF_FFFF_FFFF) as f64 / 3.402823669209385e38
    }
}

/// A strictly sorted finite set of unit-interval points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<UnitPoint>,
}

impl PointSet {
    pub fn empty() -> Self {
        PointSet { points: Vec::new() }
    }

    /// Build from arbitrary order; rejects duplicates.
    pub fn new(mut points: Vec<UnitPoint>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(ThinError::Domain("point set contains duplicates".into()));
        }
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &UnitPoint> {
        self.points.iter()
    }

    pub fn contains(&self, p: UnitPoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// True if `self` is a subset of `other`.
    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.points.iter().all(|p| other.contains(*p))
    }
}

/// A point of the circle, as a fraction of a full turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CirclePoint(pub u128);

impl CirclePoint {
    /// Rotation: addition of turns, mod 1.
    pub fn rotate(self, theta: CirclePoint) -> CirclePoint {
        CirclePoint(self.0.wrapping_add(theta.0))
    }

    /// Counterclockwise distance from `self` to `to`, in turns. Exact mod-1.
    pub fn distance_ccw(self, to: CirclePoint) -> u128 {
        to.0.wrapping_sub(self.0)
    }

    pub fn from_f64(x: f64) -> Result<Self> {
        Ok(CirclePoint(UnitPoint::from_f64(x.rem_euclid(1.0) % 1.0)?.0))
    }

    pub fn to_f64(self) -> f64 {
        UnitPoint(self.0).to_f64()
    }
}

/// A sorted set of distinct circle points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirclePointSet {
    points: Vec<CirclePoint>,
}

impl CirclePointSet {
    pub fn empty() -> Self {
        CirclePointSet { points: Vec::new() }
    }

    pub fn new(mut points: Vec<CirclePoint>) -> Result<Self> {
        points.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(ThinError::Domain(
                "circle point set contains duplicates".into(),
            ));
        }
        Ok(CirclePointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[CirclePoint] {
        &self.points
    }

    pub fn contains(&self, p: CirclePoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn is_subset_of(&self, other: &CirclePointSet) -> bool {
        self.points.iter().all(|p| other.contains(*p))
    }

    /// Rotate every point by `theta`. Exact; re-sorts the cyclic order.
    pub fn rotate(&self, theta: CirclePoint) -> CirclePointSet {
        let mut pts: Vec<CirclePoint> = self.points.iter().map(|p| p.rotate(theta)).collect();
        pts.sort_unstable();
        CirclePointSet { points: pts }
    }
}

/// An axis-aligned box in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(ThinError::Domain(
                "box bounds must be nonempty and of equal dimension".into(),
            ));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ThinError::Domain(format!(
                    "box requires lower < upper componentwise, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(BoxSpec { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        BoxSpec {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

/// A finite set of points inside a box, stored as box-relative 128-bit
/// fractions per coordinate. The fractional representation is authoritative;
/// absolute decimal coordinates are derived views.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclideanPointSet {
    dim: usize,
    coords: Vec<Vec<UnitPoint>>,
}

impl EuclideanPointSet {
    pub fn from_fractions(dim: usize, coords: Vec<Vec<UnitPoint>>) -> Result<Self> {
        if dim == 0 {
            return Err(ThinError::Domain("dimension must be positive".into()));
        }
        for c in &coords {
            if c.len() != dim {
                return Err(ThinError::Domain(format!(
                    "point has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
        }
        Ok(EuclideanPointSet { dim, coords })
    }

    /// Convert absolute coordinates to box-relative fractions. Points on or
    /// outside the boundary are rejected.
    pub fn from_absolute(points: &[Vec<f64>], bx: &BoxSpec) -> Result<Self> {
        let dim = bx.dimension();
        let mut coords = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(ThinError::Domain(format!(
                    "point has {} coordinates, box has dimension {dim}",
                    p.len()
                )));
            }
            let mut fracs = Vec::with_capacity(dim);
            for ((x, lo), hi) in p.iter().zip(&bx.lower).zip(&bx.upper) {
                if !(x > lo && x < hi) {
                    return Err(ThinError::Domain(format!(
                        "coordinate {x} not strictly inside [{lo}, {hi}]"
                    )));
                }
                fracs.push(UnitPoint::from_f64(((x - lo) / (hi - lo)).min(
                    1.0 - f64::EPSILON,
                ))?);
            }
            coords.push(fracs);
        }
        Ok(EuclideanPointSet { dim, coords })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn fractions(&self) -> &[Vec<UnitPoint>] {
        &self.coords
    }

    /// Absolute coordinates of every point inside `bx`.
    pub fn absolute(&self, bx: &BoxSpec) -> Vec<Vec<f64>> {
        self.coords
            .iter()
            .map(|fr| {
                fr.iter()
                    .zip(&bx.lower)
                    .zip(&bx.upper)
                    .map(|((f, lo), hi)| lo + f.to_f64() * (hi - lo))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_point_f64_round_trip() {
        for &x in &[0.0, 0.25, 0.5, 0.9999999, 1e-12] {
            let p = UnitPoint::from_f64(x).unwrap();
            assert!((p.to_f64() - x).abs() < 1e-15);
        }
        assert!(UnitPoint::from_f64(1.0).is_err());
        assert!(UnitPoint::from_f64(-0.1).is_err());
    }

    #[test]
    fn point_set_sorts_and_rejects_duplicates() {
        let s = PointSet::new(vec![UnitPoint(5), UnitPoint(1), UnitPoint(3)]).unwrap();
        assert_eq!(s.points(), &[UnitPoint(1), UnitPoint(3), UnitPoint(5)]);
        assert!(PointSet::new(vec![UnitPoint(2), UnitPoint(2)]).is_err());
    }

    #[test]
    fn circle_distance_wraps() {
        let a = CirclePoint(u128::MAX - 10);
        let b = CirclePoint(5);
        assert_eq!(a.distance_ccw(b), 16);
        assert_eq!(b.distance_ccw(a), u128::MAX - 15);
    }

    #[test]
    fn rotation_is_exact_bijection() {
        let s = CirclePointSet::new(vec![
            CirclePoint(1 << 100),
            CirclePoint(u128::MAX - 3),
            CirclePoint(42),
        ])
        .unwrap();
        let theta = CirclePoint(123456789 << 64);
        let back = CirclePoint(theta.0.wrapping_neg());
        assert_eq!(s.rotate(theta).rotate(back), s);
    }

    #[test]
    fn box_volume_and_validation() {
        let b = BoxSpec::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(b.volume(), 4.0);
        assert!(BoxSpec::new(vec![0.0], vec![0.0]).is_err());
        assert!(BoxSpec::new(vec![], vec![]).is_err());
    }

    #[test]
    fn euclidean_round_trip() {
        let bx = BoxSpec::new(vec![0.0], vec![2.0]).unwrap();
        let s = EuclideanPointSet::from_absolute(&[vec![1.0]], &bx).unwrap();
        assert_eq!(s.fractions()[0][0], UnitPoint(1u128 << 127));
        let abs = s.absolute(&bx);
        assert!((abs[0][0] - 1.0).abs() < 1e-12);
        assert!(EuclideanPointSet::from_absolute(&[vec![2.0]], &bx).is_err());
        assert!(EuclideanPointSet::from_absolute(&[vec![0.0]], &bx).is_err());
    }
}
