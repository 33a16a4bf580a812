use alloc::vec::Vec;

use crate::error::SimError;

/// Half-width of the initial placement cube when the environment has no box.
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;

/// External field acting on every regular agent.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Environment {
    #[default]
    None,
    /// Constant-magnitude pull toward `goal`.
    Attractor { goal: Vec<f64>, gain: f64 },
    /// Positions are confined to `[-half_width, half_width]^k` by reflection.
    ReflectingBox { half_width: f64 },
}

impl Environment {
    /// Half-width used for initial placement.
    pub fn half_width(&self) -> f64 {
        match self {
            Environment::ReflectingBox { half_width } => *half_width,
            _ => DEFAULT_HALF_WIDTH,
        }
    }
}

/// Knobs of the belief-space dynamics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct DynamicsParams {
    /// Belief-space dimension.
    pub k: usize,
    /// Social influence horizon: neighbours farther than this are ignored.
    /// Unlimited by default; serialised as `null` when infinite.
    #[cfg_attr(feature = "serde", serde(with = "unbounded"))]
    pub sih_radius: f64,
    /// Coupling gain of the whole social term.
    pub stiffness: f64,
    /// Exponent of the communication kernel `(1 + r^2)^-beta`.
    pub kernel_beta: f64,
    /// Amplitude of per-component Gaussian velocity noise.
    pub noise_eta: f64,
    pub dt: f64,
    /// Speed clamp.
    pub v_max: f64,
    pub env: Environment,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            k: 3,
            sih_radius: f64::INFINITY,
            stiffness: 1.0,
            kernel_beta: 0.5,
            noise_eta: 0.0,
            dt: 0.1,
            v_max: 5.0,
            env: Environment::None,
        }
    }
}

impl DynamicsParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let non_neg = |v: f64| v >= 0.0 && !v.is_nan();
        if self.k == 0 {
            return Err(SimError::param("k", "must be at least 1"));
        }
        if !non_neg(self.sih_radius) {
            return Err(SimError::param("sih_radius", "must be >= 0"));
        }
        if !(non_neg(self.stiffness) && self.stiffness.is_finite()) {
            return Err(SimError::param("stiffness", "must be finite and >= 0"));
        }
        if !(non_neg(self.kernel_beta) && self.kernel_beta.is_finite()) {
            return Err(SimError::param("kernel_beta", "must be finite and >= 0"));
        }
        if !(non_neg(self.noise_eta) && self.noise_eta.is_finite()) {
            return Err(SimError::param("noise_eta", "must be finite and >= 0"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::param("dt", "must be finite and > 0"));
        }
        if !(self.v_max > 0.0) {
            return Err(SimError::param("v_max", "must be > 0"));
        }
        match &self.env {
            Environment::None => {}
            Environment::Attractor { goal, gain } => {
                if goal.len() != self.k {
                    return Err(SimError::param("env.goal", "dimension must equal k"));
                }
                if !(non_neg(*gain) && gain.is_finite()) {
                    return Err(SimError::param("env.gain", "must be finite and >= 0"));
                }
            }
            Environment::ReflectingBox { half_width } => {
                if !(*half_width > 0.0 && half_width.is_finite()) {
                    return Err(SimError::param("env.half_width", "must be finite and > 0"));
                }
            }
        }
        Ok(())
    }
}


#[cfg(feature = "serde")]
mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
