//! Rotation-equivariant one-point deletion on the circle.
//!
//! Place fuel for 1/n of a full turn at each of n stations. Exactly the
//! stations attaining the minimum of the fuel balance can complete a
//! counterclockwise circuit; when that minimizer is unique it is the deleted
//! point. The set T of locations where an added station would itself become
//! the unique minimizer is a finite union of arcs of total measure exactly
//! 1/n, and the deleted point is uniform on T given the survivors; rescaling
//! its component of T to `[0, 1]` yields the spare uniform.
//!
//! All angle comparisons are exact: positions live on the dyadic 2^-128
//! grid, fuel thresholds are multiples of 1/n, and both the minimizer search
//! (256-bit integer comparisons) and the arc endpoints (big rationals) are
//! computed without rounding. Ties are therefore detected exactly, not by
//! epsilon.

use crate::error::{Result, ThinError};
use crate::point::{CirclePoint, CirclePointSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

// ---------------------------------------------------------------------------
// exact 256-bit comparison helpers
// ---------------------------------------------------------------------------

/// Full 192/256-bit product of a u128 and a u64, as (high, low) u128 words.
fn mul_u128_u64(a: u128, b: u64) -> (u128, u128) {
    let b = b as u128;
    let p1 = (a & 0xFFFF_FFFF_FFFF_FFFF) * b;
    let p2 = (a >> 64) * b;
    let (lo, carry) = (p2 << 64).overflowing_add(p1);
    let hi = (p2 >> 64) + carry as u128;
    (hi, lo)
}

/// True iff `dist * n <= m * 2^128`.
fn dist_le_fuel(dist: u128, n: u64, m: u64) -> bool {
    mul_u128_u64(dist, n) <= (m as u128, 0)
}

// ---------------------------------------------------------------------------
// gas station
// ---------------------------------------------------------------------------

/// The unique station from which a counterclockwise circuit never runs dry,
/// or `None` when the fuel-balance minimum is attained at more than one
/// station (the tie marker).
pub fn gas_station(s: &CirclePointSet) -> Result<Option<CirclePoint>> {
    let n = s.len();
    if n == 0 {
        return Err(ThinError::Domain("gas station needs at least one point".into()));
    }
    if n == 1 {
        return Ok(Some(s.points()[0]));
    }
    let pts = s.points();
    let mut winner: Option<CirclePoint> = None;
    for i in 0..n {
        // station i completes the circuit iff the m-th next station is
        // within m/n turns, for every m
        let feasible = (1..n).all(|m| {
            let d = pts[i].distance_ccw(pts[(i + m) % n]);
            dist_le_fuel(d, n as u64, m as u64)
        });
        if feasible {
            if winner.is_some() {
                return Ok(None);
            }
            winner = Some(pts[i]);
        }
    }
    debug_assert!(winner.is_some(), "some station always completes the circuit");
    Ok(winner)
}

// ---------------------------------------------------------------------------
// arc set T
// ---------------------------------------------------------------------------

/// A finite union of disjoint half-open arcs `[start, start + length)`,
/// with exact rational endpoints in turns.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcUnion {
    arcs: Vec<(BigRational, BigRational)>,
}

impl ArcUnion {
    pub fn arcs(&self) -> &[(BigRational, BigRational)] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Total measure, exact.
    pub fn measure(&self) -> BigRational {
        self.arcs.iter().map(|(_, l)| l).sum()
    }

    pub fn measure_f64(&self) -> f64 {
        self.measure().to_f64().unwrap_or(f64::NAN)
    }

    /// The index of the arc containing `point`, if any.
    pub fn find(&self, point: &BigRational) -> Option<usize> {
        self.arcs
            .iter()
            .position(|(start, len)| &mod_one(point - start) < len)
    }

    /// Position of `point` within its arc, rescaled to `[0, 1)`.
    pub fn rescale(&self, point: &BigRational) -> Option<BigRational> {
        self.find(point).map(|i| {
            let (start, len) = &self.arcs[i];
            mod_one(point - start) / len
        })
    }
}

fn mod_one(r: BigRational) -> BigRational {
    let f = r.floor();
    r - f
}

fn turns(p: CirclePoint) -> BigRational {
    BigRational::new(BigInt::from(p.0), BigInt::one() << 128)
}

fn dist_ratio(d: u128) -> BigRational {
    BigRational::new(BigInt::from(d), BigInt::one() << 128)
}

/// The arc set T for survivors `b` (|b| = n-1, fuel 1/n per station): the
/// locations where an added station becomes the circuit start. One arc per
/// gap of `b`, possibly empty; total measure exactly 1/n.
///
/// Within the gap following station `b_i`, a location `t` qualifies iff its
/// m-th previous station is at least m/n turns behind for every m, which
/// pins `t` to the top sub-interval `[L_i, next station)` of the gap.
pub fn t_set(b: &CirclePointSet) -> Result<ArcUnion> {
    let nb = b.len();
    if nb == 0 {
        return Err(ThinError::Domain(
            "t_set needs at least one survivor (n >= 2)".into(),
        ));
    }
    let n = nb + 1;
    let pts = b.points();
    let n_ratio = BigRational::new(BigInt::one(), BigInt::from(n as u64));
    let mut arcs = Vec::new();
    for i in 0..nb {
        let gap = if nb == 1 {
            BigRational::one()
        } else {
            dist_ratio(pts[i].distance_ccw(pts[(i + 1) % nb]))
        };
        // lower offset within the gap: max over m of m/n - dist(prev_m -> b_i)
        let mut lower = BigRational::zero();
        for m in 1..n {
            let prev = pts[(i + nb - ((m - 1) % nb)) % nb];
            // m = 1 refers to b_i itself (distance 0)
            let back = dist_ratio(prev.distance_ccw(pts[i]));
            let rel = BigRational::new(BigInt::from(m as u64), BigInt::from(n as u64)) - back;
            if rel > lower {
                lower = rel;
            }
        }
        debug_assert!(lower >= n_ratio);
        if lower < gap {
            let start = mod_one(turns(pts[i]) + &lower);
            arcs.push((start, gap - lower));
        }
    }
    let total = arcs.iter().map(|(_, l)| l.clone()).sum::<BigRational>();
    if total != n_ratio {
        return Err(ThinError::Internal(format!(
            "t_set measure {} != 1/{n}",
            total
        )));
    }
    Ok(ArcUnion { arcs })
}

// ---------------------------------------------------------------------------
// deletion
// ---------------------------------------------------------------------------

/// Outcome of rotation-equivariant one-point deletion.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleDeletion {
    pub kept: CirclePointSet,
    /// The deleted point; `None` on a degenerate tie.
    pub deleted: Option<CirclePoint>,
    /// 48-bit spare fraction: the deleted point's position within its arc of
    /// T, rescaled. Zero on ties.
    pub v48: u64,
    pub degenerate: bool,
}

/// Delete the circuit-start point if unique; extract the spare uniform from
/// its position within T. On a tie (measure zero for i.i.d. points) nothing
/// is deleted and the outcome is flagged degenerate.
pub fn circle_delete_one(s: &CirclePointSet) -> Result<CircleDeletion> {
    let n = s.len();
    if n == 0 {
        return Err(ThinError::Domain("cannot delete from an empty set".into()));
    }
    if n == 1 {
        let p = s.points()[0];
        // T is the whole circle; the rescaled position is the angle itself
        return Ok(CircleDeletion {
            kept: CirclePointSet::empty(),
            deleted: Some(p),
            v48: (p.0 >> 80) as u64,
            degenerate: false,
        });
    }
    let z = match gas_station(s)? {
        Some(z) => z,
        None => {
            return Ok(CircleDeletion {
                kept: s.clone(),
                deleted: None,
                v48: 0,
                degenerate: true,
            })
        }
    };
    let kept = CirclePointSet::new(
        s.points().iter().copied().filter(|&p| p != z).collect(),
    )?;
    let t = t_set(&kept)?;
    let v = t.rescale(&turns(z)).ok_or_else(|| {
        ThinError::Internal("deleted point not inside its own T set".into())
    })?;
    let v48_ratio = (v * BigRational::new(BigInt::one() << 48, BigInt::one())).floor();
    let v48 = v48_ratio
        .to_integer()
        .to_u64()
        .unwrap_or(0)
        .min((1u64 << 48) - 1);
    Ok(CircleDeletion {
        kept,
        deleted: Some(z),
        v48,
        degenerate: false,
    })
}
