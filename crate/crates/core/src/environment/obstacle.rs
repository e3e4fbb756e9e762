use crate::environment::TimeInterval;
use crate::poly::Polynomial;
use crate::{Error, Result, Vec3};

/// Highest polynomial degree accepted for obstacle trajectories.
pub const MAX_TRAJECTORY_DEGREE: usize = 5;

/// Ellipsoid whose center follows one polynomial per axis.
///
/// The polynomials are expressed in local time `t - active.lo`. Outside the
/// active window the obstacle is parked at the nearest endpoint position.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingObstacle {
    semi_axes: Vec3,
    trajectory: [Polynomial; 3],
    active: TimeInterval,
}

impl MovingObstacle {
    pub fn new(semi_axes: Vec3, trajectory: [Polynomial; 3], active: TimeInterval) -> Result<Self> {
        if semi_axes.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("semi-axes {semi_axes:?} must be positive")));
        }
        for p in &trajectory {
            if p.coeffs().is_empty() || p.coeffs().iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument("trajectory coefficients must be finite and non-empty".into()));
            }
            if p.degree() > MAX_TRAJECTORY_DEGREE {
                return Err(Error::InvalidArgument(format!(
                    "trajectory degree {} exceeds {MAX_TRAJECTORY_DEGREE}",
                    p.degree()
                )));
            }
        }
        Ok(Self { semi_axes, trajectory, active })
    }

    /// Obstacle parked at `center` for the whole active window.
    pub fn stationary(semi_axes: Vec3, center: Vec3, active: TimeInterval) -> Result<Self> {
        let traj = [0, 1, 2].map(|a| Polynomial::constant(center[a]));
        Self::new(semi_axes, traj, active)
    }

    pub fn semi_axes(&self) -> Vec3 {
        self.semi_axes
    }

    pub fn trajectory(&self) -> &[Polynomial; 3] {
        &self.trajectory
    }

    pub fn active(&self) -> TimeInterval {
        self.active
    }

    /// Center position at absolute time `t`, clamped to the active window.
    pub fn center(&self, t: f64) -> Vec3 {
        let s = self.active.clamp(t) - self.active.lo;
        Vec3::new(
            self.trajectory[0].eval(s),
            self.trajectory[1].eval(s),
            self.trajectory[2].eval(s),
        )
    }

    /// Center velocity at `t`; zero while parked.
    pub fn velocity(&self, t: f64) -> Vec3 {
        if t < self.active.lo || t > self.active.hi {
            return Vec3::zeros();
        }
        let s = t - self.active.lo;
        Vec3::new(
            self.trajectory[0].derivative().eval(s),
            self.trajectory[1].derivative().eval(s),
            self.trajectory[2].derivative().eval(s),
        )
    }

    /// Scaled distance `|E^-1 (p - c(t))|` with `E = diag(semi_axes)`;
    /// 1 on the surface.
    pub fn ellipsoid_distance(&self, p: &Vec3, t: f64) -> f64 {
        scaled_distance(p, &self.center(t), &self.semi_axes)
    }

    /// Scaled distance against the ellipsoid with every semi-axis grown by
    /// `radius`.
    pub fn inflated_distance(&self, p: &Vec3, t: f64, radius: f64) -> f64 {
        scaled_distance(p, &self.center(t), &self.semi_axes.add_scalar(radius))
    }

    /// Per-axis bounding range of the center over `window`.
    pub fn center_bounds(&self, window: &TimeInterval) -> Result<(Vec3, Vec3)> {
        let mut lo = Vec3::zeros();
        let mut hi = Vec3::zeros();
        let a = self.active;
        for axis in 0..3 {
            let poly = &self.trajectory[axis];
            let mut mn = f64::INFINITY;
            let mut mx = f64::NEG_INFINITY;
            let mut take = |v: f64| {
                mn = mn.min(v);
                mx = mx.max(v);
            };
            if window.lo < a.lo {
                take(poly.eval(0.0));
            }
            if window.hi > a.hi {
                take(poly.eval(a.length()));
            }
            if let Some(inside) = window.intersect(&a) {
                let (l, h) = poly.range_on(inside.lo - a.lo, inside.hi - a.lo)?;
                take(l);
                take(h);
            }
            lo[axis] = mn;
            hi[axis] = mx;
        }
        Ok((lo, hi))
    }

    /// Largest per-axis speed over the active window.
    pub fn max_axis_speed(&self) -> Result<f64> {
        let mut best: f64 = 0.0;
        for p in &self.trajectory {
            let (l, h) = p.derivative().range_on(0.0, self.active.length())?;
            best = best.max(l.abs()).max(h.abs());
        }
        Ok(best)
    }
}

pub(crate) fn scaled_distance(p: &Vec3, c: &Vec3, semi: &Vec3) -> f64 {
    (p - c).component_div(semi).norm()
}
