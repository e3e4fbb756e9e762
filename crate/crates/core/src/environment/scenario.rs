//! `sitmp-scenario/1` files: a JSON document describing one world, plus an
//! optional planning query and planner configuration.
//!
//! Static occupancy is stored as a list of cell blocks `[i0, j0, k0, i1, j1,
//! k1]` (upper bounds exclusive). Obstacle trajectories are per-axis
//! coefficient arrays, lowest degree first, in time relative to the start of
//! the obstacle's active window. Floats are written in shortest round-trip
//! form, so load followed by save reproduces the file byte for byte.

use serde::{Deserialize, Serialize};

use super::{CellBox, Environment, MovingObstacle, StaticGrid, TimeInterval};
use crate::planner::PlannerConfig;
use crate::poly::Polynomial;
use crate::{Error, Result, Vec3};

pub const SCENARIO_SCHEMA: &str = "sitmp-scenario/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: [f64; 3],
    pub resolution: f64,
    pub dims: [usize; 3],
    pub occupied_boxes: Vec<[usize; 6]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub semi_axes: [f64; 3],
    pub coeffs: [Vec<f64>; 3],
    pub active: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: String,
    pub grid: GridSpec,
    pub obstacles: Vec<ObstacleSpec>,
    pub horizon: [f64; 2],
    pub robot_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<PlannerConfig>,
}

impl Scenario {
    pub fn from_env(env: &Environment) -> Self {
        let g = env.grid();
        let o = g.origin();
        let grid = GridSpec {
            origin: [o.x, o.y, o.z],
            resolution: g.resolution(),
            dims: g.dims(),
            occupied_boxes: g
                .to_boxes()
                .iter()
                .map(|b| [b.lo[0], b.lo[1], b.lo[2], b.hi[0], b.hi[1], b.hi[2]])
                .collect(),
        };
        let obstacles = env
            .obstacles()
            .iter()
            .map(|ob| {
                let s = ob.semi_axes();
                let a = ob.active();
                ObstacleSpec {
                    semi_axes: [s.x, s.y, s.z],
                    coeffs: ob.trajectory().clone().map(|p| p.coeffs().to_vec()),
                    active: [a.lo, a.hi],
                }
            })
            .collect();
        let h = env.horizon();
        Self {
            schema: SCENARIO_SCHEMA.to_string(),
            grid,
            obstacles,
            horizon: [h.lo, h.hi],
            robot_radius: env.robot_radius(),
            start: None,
            goal: None,
            config: None,
        }
    }

    pub fn with_query(mut self, start: Vec3, goal: Vec3) -> Self {
        self.start = Some([start.x, start.y, start.z]);
        self.goal = Some([goal.x, goal.y, goal.z]);
        self
    }

    pub fn to_env(&self) -> Result<Environment> {
        let g = &self.grid;
        let boxes: Vec<CellBox> = g
            .occupied_boxes
            .iter()
            .map(|b| CellBox { lo: [b[0], b[1], b[2]], hi: [b[3], b[4], b[5]] })
            .collect();
        let grid = StaticGrid::from_boxes(Vec3::from(g.origin), g.resolution, g.dims, &boxes)?;
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| {
                MovingObstacle::new(
                    Vec3::from(o.semi_axes),
                    o.coeffs.clone().map(Polynomial::new),
                    TimeInterval::new(o.active[0], o.active[1])?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Environment::new(
            grid,
            obstacles,
            TimeInterval::new(self.horizon[0], self.horizon[1])?,
            self.robot_radius,
        )
    }

    pub fn query(&self) -> Option<(Vec3, Vec3)> {
        Some((Vec3::from(self.start?), Vec3::from(self.goal?)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        if s.schema != SCENARIO_SCHEMA {
            return Err(Error::Format(format!(
                "unsupported scenario schema {:?}, expected {SCENARIO_SCHEMA:?}",
                s.schema
            )));
        }
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
