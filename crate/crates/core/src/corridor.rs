//! Spatial-temporal corridors: axis-aligned boxes grown around a timed path,
//! each paired with a time window during which it is free of obstacles.
//!
//! The path is cut into pieces: one per wait at a vertex, and one per pair
//! of successive seed points along each edge. A piece that fits inside the
//! current box during a free time extends that box; otherwise a new box is
//! seeded with the piece's bounding box and its faces are pushed outward in
//! turn while the box stays statically clear and free during the piece's
//! scheduled span. Each window starts at the beginning of the box's maximal
//! free interval and ends when the path leaves the box, except for the last
//! box, which keeps its whole free interval.

use serde::{Deserialize, Serialize};

use crate::environment::{Environment, TimeInterval};
use crate::intervals::{region_collision_intervals, region_free_during};
use crate::utvd::TimedPath;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorParams {
    /// Spacing of seed points along each edge, in meters.
    pub seed_spacing: f64,
    /// Face growth step; the grid resolution when unset.
    #[serde(default)]
    pub step: Option<f64>,
    /// Largest distance a face may move away from the seed box.
    pub max_extent: f64,
}

impl Default for CorridorParams {
    fn default() -> Self {
        Self { seed_spacing: 0.5, step: None, max_extent: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct STCuboid {
    pub lo: Vec3,
    pub hi: Vec3,
    pub window: TimeInterval,
}

impl STCuboid {
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }
}

/// A stretch of the path: the segment between two seeds, traversed during
/// `span`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    a: Vec3,
    b: Vec3,
    span: TimeInterval,
}

/// Builds the corridor for a timed path that is collision-free in `env`.
pub fn inflate_corridor(tp: &TimedPath, env: &Environment, params: &CorridorParams) -> Result<Vec<STCuboid>> {
    if !(params.seed_spacing > 0.0 && params.max_extent >= 0.0) {
        return Err(Error::InvalidArgument("seed spacing must be positive and extent nonnegative".into()));
    }
    let step = params.step.unwrap_or(env.grid().resolution());
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("growth step {step} must be positive")));
    }
    let pieces = split_path(tp, env, params.seed_spacing);

    // Per cuboid: bounds, maximal free interval, end of its last piece.
    let mut boxes: Vec<(Vec3, Vec3, TimeInterval, f64)> = Vec::new();
    for piece in pieces {
        if let Some((lo, hi, free, end)) = boxes.last_mut() {
            let inside = |p: &Vec3| (0..3).all(|a| p[a] >= lo[a] && p[a] <= hi[a]);
            if inside(&piece.a) && inside(&piece.b) && free.contains_interval(&piece.span) {
                *end = end.max(piece.span.hi);
                continue;
            }
        }
        let (lo, hi) = grow_box(env, &piece, step, params.max_extent)?;
        let h = env.horizon();
        let free = region_collision_intervals(env, &lo, &hi, &h)?
            .complement_within(&h)
            .containing(&piece.span)
            .ok_or_else(|| Error::Corridor(format!("seed box is not free during {:?}", piece.span)))?;
        boxes.push((lo, hi, free, piece.span.hi));
    }
    let n = boxes.len();
    let corridor: Vec<STCuboid> = boxes
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi, free, end))| {
            let upper = if i + 1 == n { free.hi } else { end };
            STCuboid { lo, hi, window: TimeInterval::raw(free.lo, upper) }
        })
        .collect();
    for (i, w) in corridor.windows(2).enumerate() {
        let touch = (0..3).all(|a| w[0].lo[a] <= w[1].hi[a] && w[1].lo[a] <= w[0].hi[a]);
        if !touch || !w[0].window.overlaps(&w[1].window) {
            return Err(Error::Corridor(format!("cuboids {i} and {} do not overlap", i + 1)));
        }
    }
    Ok(corridor)
}

fn split_path(tp: &TimedPath, env: &Environment, spacing: f64) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let n = tp.vertices.len();
    for i in 0..n {
        let v = tp.vertices[i];
        if i == 0 || tp.depart[i] > tp.arrive[i] {
            pieces.push(Piece { a: v, b: v, span: TimeInterval::raw(tp.arrive[i], tp.depart[i]) });
        }
        if i + 1 == n {
            break;
        }
        let profile = tp.edge_profile(i);
        let len = profile.distance();
        if len == 0.0 {
            continue;
        }
        let dir = (tp.vertices[i + 1] - v) / len;
        let count = (len / spacing).ceil().max(1.0) as usize;
        for k in 0..count {
            let s0 = len * k as f64 / count as f64;
            let s1 = len * (k + 1) as f64 / count as f64;
            split_until_clear(env, &v, &dir, s0, s1, &|s| tp.depart[i] + profile.time_at(s), &mut pieces);
        }
    }
    // The final wait at the goal is open-ended; its span ends on arrival.
    let last = tp.vertices[n - 1];
    pieces.push(Piece { a: last, b: last, span: TimeInterval::raw(tp.end_time(), tp.end_time()) });
    pieces
}

/// Halves the stretch `[s0, s1]` along the edge until its bounding box is
/// statically clear. A stretch at the segment test's resolution always is,
/// since that test cleared a ball around its midpoint.
fn split_until_clear(env: &Environment, origin: &Vec3, dir: &Vec3, s0: f64, s1: f64, time: &dyn Fn(f64) -> f64, out: &mut Vec<Piece>) {
    let a = origin + dir * s0;
    let b = origin + dir * s1;
    let clear = env.grid().box_clear(&a.inf(&b), &a.sup(&b), env.robot_radius());
    if clear || s1 - s0 <= env.grid().segment_step() {
        out.push(Piece { a, b, span: TimeInterval::raw(time(s0), time(s1)) });
        return;
    }
    let mid = 0.5 * (s0 + s1);
    split_until_clear(env, origin, dir, s0, mid, time, out);
    split_until_clear(env, origin, dir, mid, s1, time, out);
}

/// Grows the piece's bounding box face by face, in the order -x, +x, -y,
/// +y, -z, +z, until every face is blocked or has moved `max_extent`.
fn grow_box(env: &Environment, piece: &Piece, step: f64, max_extent: f64) -> Result<(Vec3, Vec3)> {
    let seed_lo = piece.a.inf(&piece.b);
    let seed_hi = piece.a.sup(&piece.b);
    let (mut lo, mut hi) = (seed_lo, seed_hi);
    let radius = env.robot_radius();
    let grid = env.grid();
    if !grid.box_clear(&lo, &hi, radius) {
        return Err(Error::Corridor(format!("seed box {lo:?}..{hi:?} is statically blocked")));
    }
    let mut open = [true; 6];
    while open.iter().any(|&o| o) {
        for face in 0..6 {
            if !open[face] {
                continue;
            }
            let axis = face / 2;
            let (mut tlo, mut thi) = (lo, hi);
            let moved = if face % 2 == 0 {
                tlo[axis] = (lo[axis] - step).max(seed_lo[axis] - max_extent);
                seed_lo[axis] - tlo[axis]
            } else {
                thi[axis] = (hi[axis] + step).min(seed_hi[axis] + max_extent);
                thi[axis] - seed_hi[axis]
            };
            let grew = tlo != lo || thi != hi;
            if grew && grid.box_clear(&tlo, &thi, radius) && region_free_during(env, &tlo, &thi, &piece.span)? {
                lo = tlo;
                hi = thi;
                if moved >= max_extent {
                    open[face] = false;
                }
            } else {
                open[face] = false;
            }
        }
    }
    Ok((lo, hi))
}

/// Index of the first cuboid whose window contains `t`.
pub fn active_cuboid(corridor: &[STCuboid], t: f64) -> Result<usize> {
    corridor
        .iter()
        .position(|c| c.window.contains(t))
        .ok_or(Error::Uncovered(t))
}
