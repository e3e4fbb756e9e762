//! Safe-interval motion planning for a point-like aerial robot in 3D
//! environments with static occupancy and moving ellipsoidal obstacles.
//!
//! The pipeline has two stages. The front end builds a dynamic connected
//! visibility roadmap whose edges carry safe intervals, extracts several
//! paths that are distinct under uniform temporal visibility deformation,
//! and schedules each path for earliest arrival. The back end inflates each
//! timed path into axis-aligned spatial-temporal cuboids and optimizes a
//! uniform cubic B-spline inside them, keeping the smoothest verified result.
//!
//! ```no_run
//! use sitmp::environment::{generate_random_env, DensityClass, GeneratorParams};
//! use sitmp::planner::{plan, PlanRequest};
//! use sitmp::Vec3;
//!
//! let env = generate_random_env(&GeneratorParams::new(DensityClass::Sparse), 1).unwrap();
//! let req = PlanRequest::new(&env, Vec3::new(2.0, 2.0, 1.5), Vec3::new(16.0, 15.0, 2.0));
//! let result = plan(&req).unwrap();
//! println!("{:?}", result.status);
//! ```

pub mod bench;
pub mod bspline;
pub mod corridor;
pub mod environment;
mod error;
pub mod intervals;
pub mod kinematics;
pub mod optimizer;
pub mod planner;
pub mod poly;
pub mod roadmap;
pub mod utvd;

pub use error::{Error, Result};

/// 3D point or vector in meters (or meters per second, per second², ...).
pub type Vec3 = nalgebra::Vector3<f64>;
