//! Timed paths and the uniform temporal visibility deformation test.
//!
//! Two timed paths with common endpoints are equivalent when, after mapping
//! one path's clock affinely onto the other's, the straight segment joining
//! corresponding positions stays collision-free over the whole time window
//! between the two corresponding instants.

use serde::{Deserialize, Serialize};

use crate::environment::{Environment, TimeInterval};
use crate::intervals::segment_free_during;
use crate::kinematics::{DynamicBounds, TrapezoidalProfile};
use crate::{Error, Result, Vec3};

const ENDPOINT_TOLERANCE: f64 = 1e-9;
const TIMING_TOLERANCE: f64 = 1e-6;

/// Vertex path with a schedule. The robot waits at vertex `i` during
/// `[arrive[i], depart[i]]` and traverses edge `i` with the rest-to-rest
/// minimum-time profile during `[depart[i], arrive[i + 1]]`, inside
/// `chosen[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedPath {
    pub vertices: Vec<Vec3>,
    pub arrive: Vec<f64>,
    pub depart: Vec<f64>,
    pub chosen: Vec<TimeInterval>,
    pub bounds: DynamicBounds,
}

impl TimedPath {
    /// Builds a path and checks its structural invariants.
    pub fn new(
        vertices: Vec<Vec3>,
        arrive: Vec<f64>,
        depart: Vec<f64>,
        chosen: Vec<TimeInterval>,
        bounds: DynamicBounds,
    ) -> Result<Self> {
        let tp = Self { vertices, arrive, depart, chosen, bounds };
        tp.validate()?;
        Ok(tp)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 2 || self.arrive.len() != n || self.depart.len() != n || self.chosen.len() != n - 1 {
            return Err(Error::Invariant(format!(
                "timed path needs >= 2 vertices and matching schedules, got {n} vertices, {} arrivals, {} departures, {} intervals",
                self.arrive.len(),
                self.depart.len(),
                self.chosen.len()
            )));
        }
        for i in 0..n {
            if self.depart[i] < self.arrive[i] {
                return Err(Error::Invariant(format!("vertex {i} departs before it is reached")));
            }
        }
        for i in 0..n - 1 {
            let expected = self.depart[i] + self.edge_profile(i).duration();
            if (self.arrive[i + 1] - expected).abs() > TIMING_TOLERANCE {
                return Err(Error::Invariant(format!(
                    "edge {i} arrival {} differs from departure plus travel time {expected}",
                    self.arrive[i + 1]
                )));
            }
            let traverse = TimeInterval::raw(self.depart[i], self.arrive[i + 1]);
            let c = self.chosen[i];
            if traverse.lo < c.lo - TIMING_TOLERANCE || traverse.hi > c.hi + TIMING_TOLERANCE {
                return Err(Error::Invariant(format!("edge {i} traversal {traverse:?} leaves its interval {c:?}")));
            }
        }
        Ok(())
    }

    pub fn edge_profile(&self, i: usize) -> TrapezoidalProfile {
        TrapezoidalProfile::new((self.vertices[i + 1] - self.vertices[i]).norm(), &self.bounds)
    }

    pub fn start_time(&self) -> f64 {
        self.arrive[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.arrive.last().expect("validated path is nonempty")
    }

    pub fn duration(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Position at absolute time `t`; held at the endpoints outside the
    /// schedule.
    pub fn position(&self, t: f64) -> Vec3 {
        let n = self.vertices.len();
        for i in 0..n {
            if t <= self.depart[i] {
                return self.vertices[i];
            }
            if i + 1 < n && t < self.arrive[i + 1] {
                let profile = self.edge_profile(i);
                let d = profile.distance();
                if d == 0.0 {
                    return self.vertices[i];
                }
                let s = profile.position(t - self.depart[i]) / d;
                return self.vertices[i] + (self.vertices[i + 1] - self.vertices[i]) * s;
            }
        }
        self.vertices[n - 1]
    }
}

/// Whether `a` and `b` belong to the same class, judged at `samples`
/// uniformly spaced parameters.
pub fn check_equiv(a: &TimedPath, b: &TimedPath, env: &Environment, samples: usize) -> Result<bool> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    if a.duration() <= 0.0 || b.duration() <= 0.0 {
        return Err(Error::InvalidArgument("timed paths must have positive duration".into()));
    }
    let same_ends = (a.vertices[0] - b.vertices[0]).norm() <= ENDPOINT_TOLERANCE
        && (a.vertices.last().unwrap() - b.vertices.last().unwrap()).norm() <= ENDPOINT_TOLERANCE;
    if !same_ends {
        return Err(Error::InvalidArgument("timed paths must share start and goal".into()));
    }
    for k in 0..samples {
        let u = k as f64 / (samples - 1) as f64;
        let ta = a.start_time() + u * a.duration();
        let tb = b.start_time() + u * b.duration();
        let (pa, pb) = (a.position(ta), b.position(tb));
        // Fixed endpoint order keeps the test exactly symmetric.
        let (p1, p2) = if lex_le(&pa, &pb) { (pa, pb) } else { (pb, pa) };
        let window = TimeInterval::raw(ta.min(tb), ta.max(tb));
        if !segment_free_during(env, &p1, &p2, &window)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn lex_le(a: &Vec3, b: &Vec3) -> bool {
    (a.x, a.y, a.z) <= (b.x, b.y, b.z)
}
