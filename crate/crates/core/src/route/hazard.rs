use alloc::vec::Vec;

use super::network::{EdgeId, RoadNetwork};
use super::RouteError;

/// Points within this distance ahead of the front count as burned.
const FRONT_EPS: f64 = 1e-9;

/// A straight fire line sweeping across the plane.
///
/// Everything behind the line (on the side opposite `direction`) is burned.
/// At `t0` the line passes through `origin`; it then advances along
/// `direction` at `speed` miles per minute. Times are in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(deny_unknown_fields))]
pub struct HazardFront {
    pub origin: [f64; 2],
    pub direction: [f64; 2],
    /// Miles per minute.
    pub speed: f64,
    /// Seconds.
    pub t0: f64,
}

impl HazardFront {
    /// Builds a front, normalising `direction`.
    pub fn new(origin: [f64; 2], direction: [f64; 2], speed: f64, t0: f64) -> Result<Self, RouteError> {
        let n = libm::hypot(direction[0], direction[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(RouteError::InvalidScenario { field: "hazard.direction", reason: "must be nonzero" });
        }
        if !(speed >= 0.0 && speed.is_finite()) {
            return Err(RouteError::InvalidScenario { field: "hazard.speed", reason: "must be finite and >= 0" });
        }
        Ok(HazardFront { origin, direction: [direction[0] / n, direction[1] / n], speed, t0 })
    }

    /// Distance in miles the line has travelled by `t`, or `None` before `t0`.
    pub fn displacement(&self, t: f64) -> Option<f64> {
        (t >= self.t0).then(|| self.speed * (t - self.t0) / 60.0)
    }

    /// Signed distance of `p` ahead of the origin line.
    pub fn offset(&self, p: (f64, f64)) -> f64 {
        (p.0 - self.origin[0]) * self.direction[0] + (p.1 - self.origin[1]) * self.direction[1]
    }

    pub fn is_burned(&self, p: (f64, f64), t: f64) -> bool {
        self.displacement(t).is_some_and(|d| self.offset(p) <= d + FRONT_EPS)
    }

    /// Time at which the front reaches `p`; `None` if it never does.
    pub fn arrival_time(&self, p: (f64, f64)) -> Option<f64> {
        let s = self.offset(p);
        if s <= 0.0 {
            Some(self.t0)
        } else if self.speed > 0.0 {
            Some(self.t0 + 60.0 * s / self.speed)
        } else {
            None
        }
    }
}

/// Ignites every edge whose midpoint is burned at time `t`; returns the
/// newly ignited edges in id order.
pub fn advance_hazard(net: &mut RoadNetwork, hazard: &HazardFront, t: f64) -> Vec<EdgeId> {
    let fresh: Vec<EdgeId> =
        (0..net.edges().len()).filter(|&e| !net.edge(e).ignited && hazard.is_burned(net.midpoint(e), t)).collect();
    for &e in &fresh {
        net.ignite(e);
    }
    fresh
}
