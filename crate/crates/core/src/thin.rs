//! End-to-end deterministic thinnings: on the unit interval, on boxes via a
//! measure-preserving adapter, on large boxes by tiling, and
//! rotation-equivariantly on the circle.
//!
//! Every variant is a pure function of its input points: byte-identical
//! inputs give byte-identical outputs, and the output is always a subset of
//! the input. An infeasible intensity pair is rejected before any point is
//! touched.

use crate::circle::{self, CircleDeletion};
use crate::coupling::{self, CouplingPlan};
use crate::deletion::{self, rank_subset, split_spare};
use crate::error::{Result, ThinError};
use crate::point::{BoxSpec, CirclePointSet, EuclideanPointSet, PointSet, UnitPoint};
use crate::poisson::{self, IntensityPair};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Thin a point set on `[0, 1]` from intensity `lambda` down to `mu`.
///
/// With witness k from the feasibility scan: a set of at most k points is
/// returned unchanged; a larger set of size n is reduced to a random count
/// drawn (deterministically, from the set's own spare bits) from the
/// conditional output law given input count n, then a uniform subset of that
/// size survives.
pub fn thin_unit(s: &PointSet, lambda: f64, mu: f64) -> Result<PointSet> {
    let pair = IntensityPair::unit(lambda, mu)?;
    let k = poisson::require_feasible(&pair)?;
    thin_unit_with(s, lambda, mu, k)
}

/// As [`thin_unit`] with a pre-validated witness k (for callers that batch
/// many sets at one intensity pair).
pub fn thin_unit_with(s: &PointSet, lambda_eff: f64, mu_eff: f64, k: u32) -> Result<PointSet> {
    let n = s.len();
    if n <= k as usize {
        return Ok(s.clone());
    }
    let plan = coupling::build_plan(lambda_eff, mu_eff, k)?;
    thin_unit_planned(s, &plan)
}

/// As [`thin_unit`] with a prebuilt coupling plan.
pub fn thin_unit_planned(s: &PointSet, plan: &CouplingPlan) -> Result<PointSet> {
    let n = s.len();
    if n <= plan.k as usize {
        return Ok(s.clone());
    }
    let q = coupling::conditional_law(plan, n)?;
    deletion::delete_to_count(s, &q)
}

// ---------------------------------------------------------------------------
// box adapter
// ---------------------------------------------------------------------------

/// Interleave d per-coordinate fractions into one, round-robin from the most
/// significant bit. Volume-preserving on the dyadic grid; d = 1 is the
/// identity.
pub fn interleave(fracs: &[UnitPoint]) -> UnitPoint {
    let d = fracs.len();
    debug_assert!(d >= 1);
    if d == 1 {
        return fracs[0];
    }
    let mut out = 0u128;
    for bit in 0..128usize {
        let b = (fracs[bit % d].0 >> (127 - bit / d)) & 1;
        out = (out << 1) | b;
    }
    UnitPoint(out)
}

/// Invert [`interleave`]: recover d coordinate fractions, each exact to its
/// leading `128 / d` bits (lower bits zero).
pub fn deinterleave(p: UnitPoint, d: usize) -> Vec<UnitPoint> {
    debug_assert!(d >= 1);
    if d == 1 {
        return vec![p];
    }
    let mut fracs = vec![0u128; d];
    for bit in 0..128usize {
        let b = (p.0 >> (127 - bit)) & 1;
        fracs[bit % d] |= b << (127 - bit / d);
    }
    fracs.into_iter().map(UnitPoint).collect()
}

/// Map a Euclidean point set inside a box to a point set on `[0, 1]` by
/// rescaling each coordinate to its box-relative fraction and interleaving
/// the digit streams. Measure-preserving up to the dyadic grid.
pub fn box_adapter(p: &EuclideanPointSet, bx: &BoxSpec) -> Result<PointSet> {
    if p.dimension() != bx.dimension() {
        return Err(ThinError::Domain(format!(
            "point dimension {} != box dimension {}",
            p.dimension(),
            bx.dimension()
        )));
    }
    PointSet::new(p.fractions().iter().map(|fr| interleave(fr)).collect())
}

/// Invert [`box_adapter`]: coordinates are recovered to adapter precision
/// (`128 / d` bits each).
pub fn box_adapter_inverse(s: &PointSet, bx: &BoxSpec) -> Result<EuclideanPointSet> {
    let d = bx.dimension();
    EuclideanPointSet::from_fractions(
        d,
        s.iter().map(|&p| deinterleave(p, d)).collect(),
    )
}

/// Thin a Euclidean point set in a box. Feasibility uses the effective means
/// `(lambda * volume, mu * volume)`. Survivors keep their original
/// coordinates; only the selection round-trips through the adapter.
pub fn thin_box(
    p: &EuclideanPointSet,
    bx: &BoxSpec,
    lambda: f64,
    mu: f64,
) -> Result<EuclideanPointSet> {
    let pair = IntensityPair::new(lambda, mu, bx.volume())?;
    let k = poisson::require_feasible(&pair)?;
    if p.dimension() != bx.dimension() {
        return Err(ThinError::Domain(format!(
            "point dimension {} != box dimension {}",
            p.dimension(),
            bx.dimension()
        )));
    }
    let (le, me) = pair.effective_means();
    // images in p's storage order, so survivors map back positionally
    let images: Vec<UnitPoint> = p.fractions().iter().map(|fr| interleave(fr)).collect();
    let unit = PointSet::new(images.clone())?;
    let kept = thin_unit_with(&unit, le, me, k)?;
    EuclideanPointSet::from_fractions(
        p.dimension(),
        p.fractions()
            .iter()
            .zip(&images)
            .filter(|(_, u)| kept.contains(**u))
            .map(|(fr, _)| fr.clone())
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// tiling
// ---------------------------------------------------------------------------

/// Outcome of [`tile_thin`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileOutcome {
    pub kept: EuclideanPointSet,
    /// Number of occupied cubes processed.
    pub occupied_cubes: usize,
    /// Clipped boundary cubes whose reduced volume made the pair infeasible;
    /// their points were kept unchanged. Indices per dimension.
    pub infeasible_cubes: Vec<Vec<u64>>,
}

/// Per-dimension cube grid in fraction space: cubes are `width`-sized steps
/// of the 2^128 grid, the last one clipped.
#[derive(Debug, Clone, Copy)]
struct FracGrid {
    width: u128,
}

impl FracGrid {
    /// `side / extent` turns of the fraction axis, snapped to the grid;
    /// one single cube when the side covers the whole extent.
    fn new(side: f64, extent: f64) -> FracGrid {
        let w = side / extent;
        if w >= 1.0 {
            return FracGrid { width: 0 }; // 0 encodes the full axis
        }
        let width = (w * 3.402823669209385e38).round() as u128; // * 2^128
        FracGrid {
            width: width.max(1),
        }
    }

    fn index_of(&self, f: UnitPoint) -> u64 {
        if self.width == 0 {
            0
        } else {
            (f.0 / self.width) as u64
        }
    }

    /// Fraction-space width of cube `i` (the last cube is clipped).
    fn cube_width(&self, i: u64) -> u128 {
        if self.width == 0 {
            return u128::MAX; // effectively 2^128
        }
        let start = self.width * i as u128;
        let remaining = u128::MAX - start;
        if remaining < self.width {
            remaining + 1
        } else {
            self.width
        }
    }

    /// Position of `f` within its cube, rescaled to a full 128-bit fraction.
    fn rescale(&self, f: UnitPoint) -> UnitPoint {
        if self.width == 0 {
            return f;
        }
        let i = self.index_of(f) as u128;
        let offset = f.0 - i * self.width;
        let w_eff = self.cube_width(i as u64);
        if w_eff == u128::MAX {
            return UnitPoint(offset);
        }
        // exact (offset << 128) / w_eff
        let num = BigUint::from(offset) << 128;
        let q: BigUint = num / BigUint::from(w_eff);
        UnitPoint(q.to_u128().unwrap_or(u128::MAX))
    }

    /// Geometric fraction of the extent covered by cube `i`.
    fn volume_fraction(&self, i: u64) -> f64 {
        let w = self.cube_width(i);
        if w == u128::MAX {
            1.0
        } else {
            w as f64 / 3.402823669209385e38
        }
    }
}

/// Thin a large region by partitioning it into cubes of volume
/// `1 / (lambda - mu)` and thinning each cube independently; a point's fate
/// depends only on the points sharing its cube. Cubes are anchored at
/// `region.lower`; clipped boundary cubes use their actual volume, and any
/// boundary cube that is infeasible at that volume keeps its points and is
/// reported in the outcome.
pub fn tile_thin(
    p: &EuclideanPointSet,
    region: &BoxSpec,
    lambda: f64,
    mu: f64,
) -> Result<TileOutcome> {
    IntensityPair::new(lambda, mu, 1.0)?; // validates positivity
    if lambda <= mu {
        return Err(ThinError::Domain(format!(
            "tiling requires lambda > mu, got {lambda} <= {mu}"
        )));
    }
    let d = region.dimension();
    if p.dimension() != d {
        return Err(ThinError::Domain(format!(
            "point dimension {} != region dimension {d}",
            p.dimension()
        )));
    }
    let side = (1.0 / (lambda - mu)).powf(1.0 / d as f64);
    let grids: Vec<FracGrid> = region
        .lower
        .iter()
        .zip(&region.upper)
        .map(|(lo, hi)| FracGrid::new(side, hi - lo))
        .collect();

    // group point indices by cube
    let mut cubes: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    for (i, fr) in p.fractions().iter().enumerate() {
        let idx: Vec<u64> = fr
            .iter()
            .zip(&grids)
            .map(|(f, g)| g.index_of(*f))
            .collect();
        cubes.entry(idx).or_default().push(i);
    }

    let full_vol = region.volume();
    let work: Vec<(Vec<u64>, Vec<usize>)> = cubes.into_iter().collect();
    let results: Vec<Result<(Vec<usize>, Option<Vec<u64>>)>> = work
        .par_iter()
        .map(|(idx, members)| {
            let vol: f64 = idx
                .iter()
                .zip(&grids)
                .zip(region.lower.iter().zip(&region.upper))
                .map(|((i, g), (lo, hi))| g.volume_fraction(*i) * (hi - lo))
                .product::<f64>()
                .min(full_vol);
            let pair = IntensityPair::new(lambda, mu, vol)?;
            let k = match poisson::require_feasible(&pair) {
                Ok(k) => k,
                Err(ThinError::Infeasible { .. }) => {
                    // clipped boundary cube too small: keep its points
                    return Ok((members.clone(), Some(idx.clone())));
                }
                Err(e) => return Err(e),
            };
            // cube-relative unit points, full 128-bit entropy per coordinate
            let unit_pts: Vec<UnitPoint> = members
                .iter()
                .map(|&m| {
                    let fr = &p.fractions()[m];
                    let rel: Vec<UnitPoint> = fr
                        .iter()
                        .zip(&grids)
                        .map(|(f, g)| g.rescale(*f))
                        .collect();
                    interleave(&rel)
                })
                .collect();
            let unit = PointSet::new(unit_pts.clone())?;
            let (le, me) = pair.effective_means();
            let kept = thin_unit_with(&unit, le, me, k)?;
            let survivors: Vec<usize> = members
                .iter()
                .zip(&unit_pts)
                .filter(|(_, u)| kept.contains(**u))
                .map(|(&m, _)| m)
                .collect();
            Ok((survivors, None))
        })
        .collect();

    let mut kept_idx: Vec<usize> = Vec::new();
    let mut infeasible = Vec::new();
    let occupied = work.len();
    for r in results {
        let (members, bad) = r?;
        kept_idx.extend(members);
        if let Some(idx) = bad {
            infeasible.push(idx);
        }
    }
    kept_idx.sort_unstable();
    let kept = EuclideanPointSet::from_fractions(
        d,
        kept_idx.iter().map(|&i| p.fractions()[i].clone()).collect(),
    )?;
    Ok(TileOutcome {
        kept,
        occupied_cubes: occupied,
        infeasible_cubes: infeasible,
    })
}

// ---------------------------------------------------------------------------
// circle
// ---------------------------------------------------------------------------

/// Outcome of [`thin_circle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleOutcome {
    pub kept: CirclePointSet,
    /// Set when a measure-zero tie in the circuit-start search forced the
    /// identity fallback.
    pub degenerate: bool,
}

/// Rotation-equivariant thinning on the circle. The deterministic deletion
/// is the circuit-start rule; the surviving subset of the required size is
/// selected among the other points ranked by counterclockwise distance from
/// the deleted point, so the whole pipeline commutes with rotations.
pub fn thin_circle(s: &CirclePointSet, lambda: f64, mu: f64) -> Result<CircleOutcome> {
    let pair = IntensityPair::unit(lambda, mu)?;
    let k = poisson::require_feasible(&pair)?;
    let n = s.len();
    if n <= k as usize {
        return Ok(CircleOutcome {
            kept: s.clone(),
            degenerate: false,
        });
    }
    let plan = coupling::build_plan(lambda, mu, k)?;
    let q = coupling::conditional_law(&plan, n)?;
    let CircleDeletion {
        kept,
        deleted,
        v48,
        degenerate,
    } = circle::circle_delete_one(s)?;
    if degenerate {
        return Ok(CircleOutcome {
            kept: s.clone(),
            degenerate: true,
        });
    }
    let z = deleted.expect("non-degenerate deletion yields a point");
    if q.support_len() > n {
        return Err(ThinError::Internal(
            "conditional law support exceeds n - 1".into(),
        ));
    }
    let (v1, v2) = split_spare(v48);
    let target = q.quantile(v1 as f64 / (1u64 << 24) as f64);
    // rotation-invariant ranking: counterclockwise distance from the
    // deleted point
    let mut by_dist: Vec<_> = kept.points().to_vec();
    by_dist.sort_unstable_by_key(|p| z.distance_ccw(*p));
    let ranks = rank_subset(v2, n - 1, target);
    let kept = CirclePointSet::new(ranks.iter().map(|&r| by_dist[r]).collect())?;
    Ok(CircleOutcome {
        kept,
        degenerate: false,
    })
}

/// Convenience wrapper giving circle thinning the common subset signature.
pub fn thin_circle_points(s: &CirclePointSet, lambda: f64, mu: f64) -> Result<CirclePointSet> {
    Ok(thin_circle(s, lambda, mu)?.kept)
}
