//! Uniform B-splines with fixed knot span.
//!
//! Segment `k` of a degree-`p` spline covers
//! `[t0 + k * t_s, t0 + (k + 1) * t_s]` and blends control points
//! `Q[k] ..= Q[k + p]`. For the cubic case control point `i` is associated
//! with the knot time `t0 + (i - 1) * t_s`.

use serde::{Deserialize, Serialize};

use crate::utvd::TimedPath;
use crate::{Error, Result, Vec3};

pub const DEGREE: usize = 3;

/// Evaluation slack at the ends of the valid range.
const RANGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBSpline {
    degree: usize,
    ctrl: Vec<Vec3>,
    t_s: f64,
    t0: f64,
}

impl UniformBSpline {
    pub fn new(ctrl: Vec<Vec3>, t_s: f64, t0: f64) -> Result<Self> {
        if ctrl.len() < DEGREE + 1 {
            return Err(Error::InvalidArgument(format!(
                "need at least {} control points, got {}",
                DEGREE + 1,
                ctrl.len()
            )));
        }
        if !(t_s > 0.0) || !t_s.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidArgument(format!("knot span {t_s} must be positive and finite")));
        }
        Ok(Self { degree: DEGREE, ctrl, t_s, t0 })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ctrl_points(&self) -> &[Vec3] {
        &self.ctrl
    }

    pub fn ctrl_points_mut(&mut self) -> &mut [Vec3] {
        &mut self.ctrl
    }

    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn segments(&self) -> usize {
        self.ctrl.len() - self.degree
    }

    pub fn end_time(&self) -> f64 {
        self.t0 + self.segments() as f64 * self.t_s
    }

    pub fn duration(&self) -> f64 {
        self.segments() as f64 * self.t_s
    }

    /// Knot time associated with control point `i`.
    pub fn knot_time(&self, i: usize) -> f64 {
        self.t0 + (i as f64 - (self.degree as f64 - 1.0) / 2.0) * self.t_s
    }

    /// Same control points with a different knot span.
    pub fn with_t_s(&self, t_s: f64) -> Result<Self> {
        Self::new(self.ctrl.clone(), t_s, self.t0)
    }

    /// Segment index and local parameter in `[0, 1]` for time `t`.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let end = self.end_time();
        if !(t >= self.t0 - RANGE_TOLERANCE && t <= end + RANGE_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside spline range [{}, {end}]",
                self.t0
            )));
        }
        let x = ((t - self.t0) / self.t_s).clamp(0.0, self.segments() as f64);
        let k = (x.floor() as usize).min(self.segments() - 1);
        Ok((k, x - k as f64))
    }

    /// Position (`order` 0), velocity, acceleration or jerk (`order` 3).
    pub fn evaluate(&self, t: f64, order: usize) -> Result<Vec3> {
        if order > self.degree {
            return Err(Error::InvalidArgument(format!("derivative order {order} exceeds degree {}", self.degree)));
        }
        let (k, u) = self.locate(t)?;
        let mut pts = self.ctrl[k..=k + self.degree].to_vec();
        for _ in 0..order {
            pts = differences(&pts, self.t_s);
        }
        let w = basis(self.degree - order, u);
        Ok(pts.iter().zip(&w).map(|(p, b)| p * *b).sum())
    }

    /// Velocity, acceleration and jerk control points.
    pub fn derivative_ctrl_points(&self) -> Result<(Vec<Vec3>, Vec<Vec3>, Vec<Vec3>)> {
        derivative_ctrl_points(&self.ctrl, self.t_s)
    }
}

/// Forward differences divided by `t_s`.
pub fn differences(points: &[Vec3], t_s: f64) -> Vec<Vec3> {
    points.windows(2).map(|w| (w[1] - w[0]) / t_s).collect()
}

pub fn derivative_ctrl_points(q: &[Vec3], t_s: f64) -> Result<(Vec<Vec3>, Vec<Vec3>, Vec<Vec3>)> {
    if q.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 control points, got {}", q.len())));
    }
    let v = differences(q, t_s);
    let a = differences(&v, t_s);
    let j = differences(&a, t_s);
    Ok((v, a, j))
}

/// The `degree + 1` nonzero uniform B-spline basis values at local
/// parameter `u` of a segment, via the Cox-de Boor recursion on integer
/// knots.
pub fn basis(degree: usize, u: f64) -> Vec<f64> {
    // Work on the segment [degree, degree + 1]; basis N_{i,d} is nonzero
    // there for i in degree - d ..= degree.
    let t = degree as f64 + u;
    let mut n = vec![1.0];
    for d in 1..=degree {
        let first = degree - d;
        let mut next = vec![0.0; d + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            let i = (first + j) as f64;
            // N_{i,d-1} sits at index j - 1 of `n`, N_{i+1,d-1} at index j.
            let left = if j >= 1 { n[j - 1] } else { 0.0 };
            let right = if j < d { n[j] } else { 0.0 };
            *slot = (t - i) / d as f64 * left + (i + d as f64 + 1.0 - t) / d as f64 * right;
        }
        n = next;
    }
    n
}

/// Cubic spline through the timed path sampled at knot times, starting and
/// ending at rest. The knot span is kept; the spline lasts the smallest
/// whole number of spans covering the path and hovers at the goal after the
/// path ends.
pub fn fit_initial(tp: &TimedPath, t_s: f64) -> Result<UniformBSpline> {
    if !(t_s > 0.0) {
        return Err(Error::InvalidArgument(format!("knot span {t_s} must be positive")));
    }
    let d = tp.duration();
    if d < 4.0 * t_s - RANGE_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "path duration {d} is shorter than four knot spans of {t_s}"
        )));
    }
    let segments = ((d / t_s) - RANGE_TOLERANCE).ceil().max(4.0) as usize;
    let n = segments + DEGREE;
    let t0 = tp.start_time();
    let start = tp.vertices[0];
    let goal = *tp.vertices.last().expect("validated path");
    let ctrl = (0..n)
        .map(|i| {
            if i < 3 {
                start
            } else if i + 3 >= n {
                goal
            } else {
                tp.position(t0 + (i as f64 - 1.0) * t_s)
            }
        })
        .collect();
    UniformBSpline::new(ctrl, t_s, t0)
}
