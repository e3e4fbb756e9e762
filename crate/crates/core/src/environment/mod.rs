//! World model: static occupancy plus moving ellipsoids with known
//! polynomial trajectories over a finite planning horizon.

mod generate;
mod grid;
mod interval;
mod obstacle;
pub mod scenario;

use std::sync::Arc;

pub use generate::{generate_random_env, DensityClass, GeneratorParams};
pub use grid::{CellBox, StaticGrid};
pub use interval::TimeInterval;
pub use obstacle::{MovingObstacle, MAX_TRAJECTORY_DEGREE};
pub use scenario::{Scenario, SCENARIO_SCHEMA};

use crate::{Error, Result, Vec3};

/// Immutable planning world. Cloning is cheap: the grid is shared.
#[derive(Debug, Clone)]
pub struct Environment {
    grid: Arc<StaticGrid>,
    obstacles: Vec<MovingObstacle>,
    horizon: TimeInterval,
    robot_radius: f64,
    /// Center range of each obstacle over the horizon, used to skip
    /// obstacles that can never reach a query box.
    reach: Vec<(Vec3, Vec3)>,
    /// Per obstacle, center range over consecutive slices of the horizon
    /// of length [`SWEEP_SLICE`].
    sweep: Vec<Vec<(Vec3, Vec3)>>,
}

/// Slice length used to bound obstacle motion piecewise in time.
pub(crate) const SWEEP_SLICE: f64 = 0.5;

impl Environment {
    pub fn new(grid: StaticGrid, obstacles: Vec<MovingObstacle>, horizon: TimeInterval, robot_radius: f64) -> Result<Self> {
        Self::with_shared_grid(Arc::new(grid), obstacles, horizon, robot_radius)
    }

    fn with_shared_grid(
        grid: Arc<StaticGrid>,
        obstacles: Vec<MovingObstacle>,
        horizon: TimeInterval,
        robot_radius: f64,
    ) -> Result<Self> {
        if !(robot_radius >= 0.0) || !robot_radius.is_finite() {
            return Err(Error::InvalidArgument(format!("robot radius {robot_radius} must be >= 0")));
        }
        if horizon.length() <= 0.0 {
            return Err(Error::InvalidArgument("horizon must have positive length".into()));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if !horizon.contains_interval(&o.active()) {
                return Err(Error::InvalidArgument(format!(
                    "obstacle {i} active window {:?} exceeds horizon {horizon:?}",
                    o.active()
                )));
            }
        }
        let reach = obstacles
            .iter()
            .map(|o| o.center_bounds(&horizon))
            .collect::<Result<Vec<_>>>()?;
        let slices = (horizon.length() / SWEEP_SLICE).ceil().max(1.0) as usize;
        let sweep = obstacles
            .iter()
            .map(|o| {
                (0..slices)
                    .map(|k| {
                        let lo = horizon.lo + k as f64 * SWEEP_SLICE;
                        let hi = (lo + SWEEP_SLICE).min(horizon.hi);
                        o.center_bounds(&TimeInterval::raw(lo, hi))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, obstacles, horizon, robot_radius, reach, sweep })
    }

    /// Same world seen by a robot of a different radius.
    pub fn with_robot_radius(&self, robot_radius: f64) -> Result<Self> {
        Self::with_shared_grid(self.grid.clone(), self.obstacles.clone(), self.horizon, robot_radius)
    }

    pub fn grid(&self) -> &StaticGrid {
        &self.grid
    }

    pub fn obstacles(&self) -> &[MovingObstacle] {
        &self.obstacles
    }

    pub fn horizon(&self) -> TimeInterval {
        self.horizon
    }

    pub fn robot_radius(&self) -> f64 {
        self.robot_radius
    }

    /// Sub-windows of `window` during which the center of obstacle `index`
    /// may lie inside the box `[lo, hi]`. Outside them it certainly does not.
    pub(crate) fn candidate_windows(&self, index: usize, lo: &Vec3, hi: &Vec3, window: &TimeInterval) -> Vec<TimeInterval> {
        let (rlo, rhi) = &self.reach[index];
        if (0..3).any(|a| rlo[a] > hi[a] || rhi[a] < lo[a]) {
            return Vec::new();
        }
        let h = self.horizon;
        let slices = &self.sweep[index];
        let first = (((window.lo - h.lo) / SWEEP_SLICE).floor().max(0.0) as usize).min(slices.len() - 1);
        let last = (((window.hi - h.lo) / SWEEP_SLICE).floor().max(0.0) as usize).min(slices.len() - 1);
        let mut out: Vec<TimeInterval> = Vec::new();
        for k in first..=last {
            let (clo, chi) = &slices[k];
            if (0..3).any(|a| clo[a] > hi[a] || chi[a] < lo[a]) {
                continue;
            }
            let s_lo = h.lo + k as f64 * SWEEP_SLICE;
            let s_hi = if k + 1 == slices.len() { h.hi } else { s_lo + SWEEP_SLICE };
            let Some(part) = TimeInterval::raw(s_lo, s_hi).intersect(window) else {
                continue;
            };
            match out.last_mut() {
                Some(prev) if prev.hi >= part.lo => prev.hi = prev.hi.max(part.hi),
                _ => out.push(part),
            }
        }
        out
    }

    /// Point-in-time freeness: the cell holding `p` is free and `p` lies
    /// strictly outside every obstacle ellipsoid grown by the robot radius.
    pub fn is_point_free(&self, p: &Vec3, t: f64) -> bool {
        let Some(c) = self.grid.cell_of(p) else {
            return false;
        };
        if self.grid.is_occupied(c[0] as isize, c[1] as isize, c[2] as isize) {
            return false;
        }
        self.obstacles
            .iter()
            .all(|o| o.inflated_distance(p, t, self.robot_radius) > 1.0)
    }

    /// Static clearance of the robot sphere at `p`.
    pub fn is_statically_free(&self, p: &Vec3) -> bool {
        self.grid.point_clear(p, self.robot_radius)
    }

    /// Static clearance with enough slack that short edges from `p` can pass
    /// [`edge_static_free`](crate::intervals::edge_static_free).
    pub fn is_comfortably_free(&self, p: &Vec3) -> bool {
        self.grid.point_clear(p, self.robot_radius + self.grid.segment_step())
    }
}
