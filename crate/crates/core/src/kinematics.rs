//! Rest-to-rest minimum-time motion of a double integrator along a straight
//! edge.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicBounds {
    pub v_max: f64,
    pub a_max: f64,
}

impl DynamicBounds {
    pub fn new(v_max: f64, a_max: f64) -> Result<Self> {
        if !(v_max > 0.0 && a_max > 0.0) || !v_max.is_finite() || !a_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bounds must be positive and finite, got v_max={v_max}, a_max={a_max}"
            )));
        }
        Ok(Self { v_max, a_max })
    }
}

impl Default for DynamicBounds {
    fn default() -> Self {
        Self { v_max: 2.0, a_max: 2.0 }
    }
}

/// Shortest time to cover `distance` starting and ending at rest.
pub fn min_travel_time(distance: f64, bounds: &DynamicBounds) -> Result<f64> {
    if !(distance >= 0.0) {
        return Err(Error::InvalidArgument(format!("distance {distance} must be >= 0")));
    }
    Ok(TrapezoidalProfile::new(distance, bounds).duration())
}

/// Time-optimal rest-to-rest profile: accelerate at `a_max`, cruise at
/// `v_max` if the distance allows, decelerate at `a_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidalProfile {
    distance: f64,
    accel: f64,
    peak_speed: f64,
    ramp_time: f64,
    cruise_time: f64,
}

impl TrapezoidalProfile {
    /// `distance` must be nonnegative; callers validate.
    pub fn new(distance: f64, bounds: &DynamicBounds) -> Self {
        let a = bounds.a_max;
        let v = bounds.v_max;
        let d = distance.max(0.0);
        if d <= v * v / a {
            let ramp = (d / a).sqrt();
            Self { distance: d, accel: a, peak_speed: a * ramp, ramp_time: ramp, cruise_time: 0.0 }
        } else {
            Self { distance: d, accel: a, peak_speed: v, ramp_time: v / a, cruise_time: d / v - v / a }
        }
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn duration(&self) -> f64 {
        2.0 * self.ramp_time + self.cruise_time
    }

    /// Distance covered `tau` seconds after departure, clamped to the ends.
    pub fn position(&self, tau: f64) -> f64 {
        let (a, tr, tc) = (self.accel, self.ramp_time, self.cruise_time);
        if tau <= 0.0 {
            0.0
        } else if tau <= tr {
            0.5 * a * tau * tau
        } else if tau <= tr + tc {
            0.5 * a * tr * tr + self.peak_speed * (tau - tr)
        } else if tau < self.duration() {
            let rem = self.duration() - tau;
            self.distance - 0.5 * a * rem * rem
        } else {
            self.distance
        }
    }

    pub fn speed(&self, tau: f64) -> f64 {
        let (a, tr, tc) = (self.accel, self.ramp_time, self.cruise_time);
        if tau <= 0.0 || tau >= self.duration() {
            0.0
        } else if tau <= tr {
            a * tau
        } else if tau <= tr + tc {
            self.peak_speed
        } else {
            a * (self.duration() - tau)
        }
    }

    /// Inverse of [`position`](Self::position): first time the covered
    /// distance reaches `s`.
    pub fn time_at(&self, s: f64) -> f64 {
        let (a, tr, tc) = (self.accel, self.ramp_time, self.cruise_time);
        let s = s.clamp(0.0, self.distance);
        let ramp_dist = 0.5 * a * tr * tr;
        if s <= ramp_dist {
            (2.0 * s / a).sqrt()
        } else if s <= ramp_dist + self.peak_speed * tc {
            tr + (s - ramp_dist) / self.peak_speed
        } else {
            self.duration() - (2.0 * (self.distance - s) / a).sqrt()
        }
    }
}
