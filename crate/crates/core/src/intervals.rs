//! Exact collision and safe intervals of axis-aligned boxes and straight
//! edges against polynomial obstacle trajectories.
//!
//! An obstacle collides with a region while its center lies strictly inside
//! the region's box grown by the obstacle semi-axes plus the robot radius.
//! The crossing times are roots of `x_axis(t) - face`, so intervals are exact
//! up to the root tolerance.

use serde::{Deserialize, Serialize};

use crate::environment::{Environment, MovingObstacle, TimeInterval};
use crate::{Error, Result, Vec3};

/// Sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<TimeInterval>,
}

pub type SafeIntervalSet = IntervalSet;

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(window: TimeInterval) -> Self {
        Self { intervals: vec![window] }
    }

    /// Normalizes arbitrary intervals: sorts and merges overlapping or
    /// touching members.
    pub fn from_intervals(mut intervals: Vec<TimeInterval>) -> Self {
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<TimeInterval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                Some(prev) if iv.lo <= prev.hi => prev.hi = prev.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[TimeInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(TimeInterval::length).sum()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::from_intervals(all)
    }

    /// Closed gaps of `self` inside `window`, including zero-length ones.
    pub fn complement_within(&self, window: &TimeInterval) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = window.lo;
        for iv in &self.intervals {
            if iv.hi < window.lo {
                continue;
            }
            if iv.lo > window.hi {
                break;
            }
            if iv.lo >= cursor {
                out.push(TimeInterval::raw(cursor, iv.lo));
            }
            cursor = cursor.max(iv.hi);
        }
        if cursor <= window.hi {
            out.push(TimeInterval::raw(cursor, window.hi));
        }
        Self { intervals: out }
    }

    /// Members strictly longer than `t_min`.
    pub fn longer_than(&self, t_min: f64) -> IntervalSet {
        Self { intervals: self.intervals.iter().copied().filter(|iv| iv.length() > t_min).collect() }
    }

    pub fn restricted_to(&self, window: &TimeInterval) -> IntervalSet {
        Self { intervals: self.intervals.iter().filter_map(|iv| iv.intersect(window)).collect() }
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(c) = a.intersect(b) {
                    out.push(c);
                }
            }
        }
        Self::from_intervals(out)
    }

    /// The member containing all of `window`, if any.
    pub fn containing(&self, window: &TimeInterval) -> Option<TimeInterval> {
        self.intervals.iter().copied().find(|iv| iv.contains_interval(window))
    }

    /// Whether some member overlaps `window` in more than a single instant,
    /// or contains it when `window` is a single instant. This treats members
    /// as open sets, which is how collision intervals are meant.
    pub fn meets_open(&self, window: &TimeInterval) -> bool {
        self.intervals.iter().any(|iv| {
            if window.length() > 0.0 {
                iv.lo < window.hi && iv.hi > window.lo
            } else {
                iv.lo < window.lo && iv.hi > window.lo
            }
        })
    }
}

/// Axis-aligned box `[lo, hi]` used for collision interval queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflatedCuboid {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl InflatedCuboid {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self> {
        if (0..3).any(|a| !(lo[a] < hi[a])) {
            return Err(Error::InvalidArgument(format!("cuboid bounds {lo:?} .. {hi:?} are not ordered")));
        }
        Ok(Self { lo, hi })
    }

    fn strictly_contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] > self.lo[a] && p[a] < self.hi[a])
    }
}

/// Bounding box of the segment `p1 p2` grown by `margin` on every side.
pub fn edge_cuboid(p1: &Vec3, p2: &Vec3, margin: &Vec3) -> Result<InflatedCuboid> {
    if margin.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(format!("margin {margin:?} must be positive")));
    }
    InflatedCuboid::new(p1.inf(p2) - margin, p1.sup(p2) + margin)
}

/// Maximal intervals within `horizon` during which the obstacle center lies
/// inside `cuboid`.
pub fn cuboid_collision_intervals(cuboid: &InflatedCuboid, obs: &MovingObstacle, horizon: &TimeInterval) -> Result<IntervalSet> {
    Ok(IntervalSet::from_intervals(center_inside_intervals(cuboid, obs, horizon)?))
}

fn center_inside_intervals(cuboid: &InflatedCuboid, obs: &MovingObstacle, window: &TimeInterval) -> Result<Vec<TimeInterval>> {
    let a = obs.active();
    let mut out = Vec::new();
    if window.lo < a.lo && cuboid.strictly_contains(&obs.center(a.lo)) {
        out.push(TimeInterval::raw(window.lo, window.hi.min(a.lo)));
    }
    if let Some(w) = window.intersect(&a) {
        let (s0, s1) = (w.lo - a.lo, w.hi - a.lo);
        let mut breaks = vec![s0, s1];
        for (axis, poly) in obs.trajectory().iter().enumerate() {
            breaks.extend(poly.shifted(cuboid.lo[axis]).roots_in(s0, s1)?);
            breaks.extend(poly.shifted(cuboid.hi[axis]).roots_in(s0, s1)?);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        if breaks.len() == 1 {
            if cuboid.strictly_contains(&obs.center(w.lo)) {
                out.push(w);
            }
        } else {
            for pair in breaks.windows(2) {
                let mid = a.lo + 0.5 * (pair[0] + pair[1]);
                if cuboid.strictly_contains(&obs.center(mid)) {
                    out.push(TimeInterval::raw(a.lo + pair[0], a.lo + pair[1]));
                }
            }
        }
    }
    if window.hi > a.hi && cuboid.strictly_contains(&obs.center(a.hi)) {
        out.push(TimeInterval::raw(window.lo.max(a.hi), window.hi));
    }
    Ok(out)
}

/// Union over all obstacles of the times at which the region `[lo, hi]`,
/// grown by each obstacle's semi-axes and the robot radius, contains that
/// obstacle's center, restricted to `window`.
pub fn region_collision_intervals(env: &Environment, lo: &Vec3, hi: &Vec3, window: &TimeInterval) -> Result<IntervalSet> {
    let mut all = Vec::new();
    for (i, obs) in env.obstacles().iter().enumerate() {
        let margin = obs.semi_axes().add_scalar(env.robot_radius());
        let cuboid = InflatedCuboid { lo: lo - margin, hi: hi + margin };
        for w in env.candidate_windows(i, &cuboid.lo, &cuboid.hi, window) {
            all.extend(center_inside_intervals(&cuboid, obs, &w)?);
        }
    }
    Ok(IntervalSet::from_intervals(all))
}

/// Positive-length free intervals of the region `[lo, hi]` over the horizon,
/// ignoring static occupancy.
pub fn region_safe_intervals(env: &Environment, lo: &Vec3, hi: &Vec3) -> Result<IntervalSet> {
    let h = env.horizon();
    Ok(region_collision_intervals(env, lo, hi, &h)?.complement_within(&h).longer_than(0.0))
}

/// Whether no obstacle touches the region `[lo, hi]` during `window`.
pub fn region_free_during(env: &Environment, lo: &Vec3, hi: &Vec3, window: &TimeInterval) -> Result<bool> {
    if window.length() <= 0.0 {
        // Collision intervals clipped to an instant lose their interior.
        let t = window.lo;
        return Ok(env.obstacles().iter().all(|obs| {
            let margin = obs.semi_axes().add_scalar(env.robot_radius());
            !InflatedCuboid { lo: lo - margin, hi: hi + margin }.strictly_contains(&obs.center(t))
        }));
    }
    Ok(!region_collision_intervals(env, lo, hi, window)?.meets_open(window))
}

/// Whether the segment, swept by the robot sphere, avoids every occupied
/// cell. Endpoints outside the grid make the edge blocked.
pub fn edge_static_free(env: &Environment, p1: &Vec3, p2: &Vec3) -> bool {
    let g = env.grid();
    g.contains(p1) && g.contains(p2) && g.segment_clear(p1, p2, env.robot_radius())
}

/// Safe intervals of the edge `p1 p2` longer than `t_min`; empty when the
/// edge is statically blocked.
pub fn edge_safe_intervals(env: &Environment, p1: &Vec3, p2: &Vec3, t_min: f64) -> Result<IntervalSet> {
    if !edge_static_free(env, p1, p2) {
        return Ok(IntervalSet::empty());
    }
    let h = env.horizon();
    let ci = region_collision_intervals(env, &p1.inf(p2), &p1.sup(p2), &h)?;
    Ok(ci.complement_within(&h).longer_than(t_min))
}

/// Whether the segment is statically free and no obstacle can touch it at
/// any time in `window`.
pub fn segment_free_during(env: &Environment, p1: &Vec3, p2: &Vec3, window: &TimeInterval) -> Result<bool> {
    if !edge_static_free(env, p1, p2) {
        return Ok(false);
    }
    region_free_during(env, &p1.inf(p2), &p1.sup(p2), window)
}
