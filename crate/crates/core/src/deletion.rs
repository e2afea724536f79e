//! Deterministic one-point deletion on `[0, 1]` and the random-count
//! deletion built on top of it.
//!
//! Each 128-bit point is read as a triple through a fixed bit split:
//! the top 32 bits give a residue class, the next 48 bits an auxiliary
//! ordering fraction, the final 48 bits a spare uniform. Deleting the point
//! whose ordering fraction has rank `K = sum of residues mod n` leaves n-1
//! points that are again jointly uniform, plus the deleted point's spare
//! fraction, which is uniform and independent of the survivors.
//!
//! The split is the finite-precision stand-in for a measurable bijection
//! between `[0,1]` and `{1..n} x [0,1]^2`; the residue carries a bias of at
//! most `n * 2^-32`, the single source of distributional approximation here.

use crate::coupling::DiscreteLaw;
use crate::error::{Result, ThinError};
use crate::point::{PointSet, UnitPoint};

/// Width of the y and z bit fields.
pub const FIELD_BITS: u32 = 48;
const FIELD_MASK: u64 = (1 << FIELD_BITS) - 1;

/// The (x, y, z) triple extracted from one point for a given set size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleCode {
    /// Residue class in `{1, ..., n}`.
    pub x: u32,
    /// 48-bit ordering fraction (numerator of y / 2^48).
    pub y: u64,
    /// 48-bit spare fraction (numerator of z / 2^48).
    pub z: u64,
}

/// Split a point into its triple for a set of size `n`.
pub fn encode_split(p: UnitPoint, n: usize) -> TripleCode {
    debug_assert!(n >= 1);
    let top32 = (p.0 >> 96) as u32;
    TripleCode {
        x: 1 + (top32 % n as u32),
        y: ((p.0 >> FIELD_BITS) as u64) & FIELD_MASK,
        z: (p.0 as u64) & FIELD_MASK,
    }
}

/// The result of deleting one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionTrace {
    pub kept: PointSet,
    pub deleted: UnitPoint,
    /// The 1-based rank K that selected the deleted point.
    pub k_index: usize,
    /// The deleted point's 48-bit spare fraction.
    pub v: u64,
}

/// Delete exactly one point: the one whose y-field has rank
/// `K = (sum of x-fields) mod n` (residue 0 read as n), ties in y broken by
/// ascending point order.
pub fn delete_one(s: &PointSet) -> Result<DeletionTrace> {
    let n = s.len();
    if n == 0 {
        return Err(ThinError::Domain("cannot delete from an empty set".into()));
    }
    let codes: Vec<TripleCode> = s.iter().map(|&p| encode_split(p, n)).collect();
    let sum: u64 = codes.iter().map(|c| c.x as u64).sum();
    let residue = (sum % n as u64) as usize;
    let k_index = if residue == 0 { n } else { residue };

    // rank the points by (y, point order)
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (codes[i].y, i));
    let del_idx = order[k_index - 1];

    let kept: Vec<UnitPoint> = s
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != del_idx)
        .map(|(_, &p)| p)
        .collect();
    Ok(DeletionTrace {
        kept: PointSet::new(kept)?,
        deleted: s.points()[del_idx],
        k_index,
        v: codes[del_idx].z,
    })
}

/// Estimate the measure of `R(B) = { w : delete_one(B u {w}).kept = B }` by a
/// stratified sweep of `samples` locations. For n-1 = |B| points the exact
/// answer is 1/n.
pub fn r_set_measure(b: &PointSet, samples: u64) -> f64 {
    assert!(samples >= 1);
    if b.is_empty() {
        return 1.0; // every singleton deletes back to the empty set
    }
    let stratum = u128::MAX / samples as u128;
    let mut hits = 0u64;
    let mut pts: Vec<UnitPoint> = Vec::with_capacity(b.len() + 1);
    for i in 0..samples {
        // stratified jitter from a fixed counter hash
        let jitter = ((mix64(i ^ 0x5157_9AB3_0F00_D5E5) as u128) << 64
            | mix64(i.wrapping_mul(0x9E37_79B9_7F4A_7C15)) as u128)
            % stratum;
        let w = UnitPoint(i as u128 * stratum + jitter);
        if b.contains(w) {
            continue;
        }
        pts.clear();
        pts.extend_from_slice(b.points());
        pts.push(w);
        let s = PointSet::new(pts.clone()).expect("distinct by construction");
        let trace = delete_one(&s).expect("nonempty");
        if trace.deleted == w {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

/// Split a 48-bit spare fraction into two independent 24-bit sub-fractions:
/// even bits and odd bits (counted from the most significant end).
pub fn split_spare(v: u64) -> (u32, u32) {
    let mut v1 = 0u32;
    let mut v2 = 0u32;
    for i in 0..24 {
        let hi_bit = 47 - 2 * i;
        v1 = (v1 << 1) | (((v >> hi_bit) & 1) as u32);
        v2 = (v2 << 1) | (((v >> (hi_bit - 1)) & 1) as u32);
    }
    (v1, v2)
}

/// SplitMix64 finalizer; the fixed expander behind subset selection.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically pick `take` of the ranks `0..n` keyed by a 24-bit seed:
/// each rank gets the key `mix64(seed, rank)` and the `take` smallest keys
/// win. For a uniform seed this approximates a uniformly random subset.
pub fn rank_subset(v2: u32, n: usize, take: usize) -> Vec<usize> {
    debug_assert!(take <= n);
    let mut keyed: Vec<(u64, usize)> = (0..n)
        .map(|r| (mix64(((v2 as u64) << 40) ^ r as u64), r))
        .collect();
    keyed.sort_unstable();
    let mut chosen: Vec<usize> = keyed[..take].iter().map(|&(_, r)| r).collect();
    chosen.sort_unstable();
    chosen
}

/// Delete down to a random count: one deterministic deletion supplies a spare
/// uniform, whose even bits drive the inverse cdf of `law` and whose odd bits
/// key the subset selection among the survivors.
pub fn delete_to_count(s: &PointSet, law: &DiscreteLaw) -> Result<PointSet> {
    let n = s.len();
    if n == 0 {
        return Err(ThinError::Domain("cannot thin an empty set".into()));
    }
    if law.support_len() > n {
        return Err(ThinError::Domain(format!(
            "law supported up to {} but only {} points (support must lie in 0..n-1)",
            law.support_len() - 1,
            n
        )));
    }
    let trace = delete_one(s)?;
    let (v1, v2) = split_spare(trace.v);
    let u = v1 as f64 / (1u64 << 24) as f64;
    let target = law.quantile(u);
    let ranks = rank_subset(v2, n - 1, target);
    let kept = trace.kept.points();
    PointSet::new(ranks.iter().map(|&r| kept[r]).collect())
}
