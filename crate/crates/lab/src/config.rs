//! JSON experiment configuration.
//!
//! Unknown keys are rejected. Omitted fields take their defaults, and the
//! resolved configuration is echoed into every output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stampede_core::experiment::SwarmExperiment;
use stampede_core::presets;
use stampede_core::route::{FleetScenario, HazardFront, RoadNetwork};

use crate::error::{LabError, Result};
use crate::netfile::read_network;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Swarm,
    Route,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Swarm => "swarm",
            Kind::Route => "route",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: Kind,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swarm: Option<SwarmExperiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<RouteConfig>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkPreset {
    Evacuation,
    WreckCorridor,
    FrontCorridor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSource {
    Preset(NetworkPreset),
    /// Relative paths are taken from the config file's directory.
    File(PathBuf),
}

/// Fleet scenario parameters; defaults reproduce the evacuation preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RouteConfig {
    pub network: NetworkSource,
    pub hazard: Option<HazardFront>,
    pub source: usize,
    pub destination: usize,
    pub spawn_rate: f64,
    pub model_b_fraction: f64,
    pub p_block: f64,
    pub wreck_threshold: u32,
    pub vehicle_speed: f64,
    pub dt: f64,
    pub horizon: f64,
    pub forced_stall: Option<u32>,
}

impl Default for RouteConfig {
    fn default() -> Self {
        let sc = presets::evacuation();
        RouteConfig {
            network: NetworkSource::Preset(NetworkPreset::Evacuation),
            hazard: sc.hazard,
            source: sc.source,
            destination: sc.destination,
            spawn_rate: sc.spawn_rate,
            model_b_fraction: sc.model_b_fraction,
            p_block: sc.p_block,
            wreck_threshold: sc.wreck_threshold,
            vehicle_speed: sc.vehicle_speed,
            dt: sc.dt,
            horizon: sc.horizon,
            forced_stall: sc.forced_stall,
        }
    }
}

impl RouteConfig {
    fn network(&self, base: &Path) -> Result<RoadNetwork> {
        match &self.network {
            NetworkSource::Preset(NetworkPreset::Evacuation) => Ok(presets::evacuation().network),
            NetworkSource::Preset(NetworkPreset::WreckCorridor) => Ok(presets::wreck_corridor().network),
            NetworkSource::Preset(NetworkPreset::FrontCorridor) => Ok(presets::front_corridor().network),
            NetworkSource::File(p) => read_network(&base.join(p)),
        }
    }

    /// Builds the scenario for one seed; file networks are resolved against `base`.
    pub fn scenario(&self, base: &Path, seed: u64) -> Result<FleetScenario> {
        let hazard = match self.hazard {
            Some(h) => Some(HazardFront::new(h.origin, h.direction, h.speed, h.t0)?),
            None => None,
        };
        let sc = FleetScenario {
            network: self.network(base)?,
            hazard,
            source: self.source,
            destination: self.destination,
            spawn_rate: self.spawn_rate,
            model_b_fraction: self.model_b_fraction,
            p_block: self.p_block,
            wreck_threshold: self.wreck_threshold,
            vehicle_speed: self.vehicle_speed,
            dt: self.dt,
            horizon: self.horizon,
            seed,
            forced_stall: self.forced_stall,
        };
        sc.validate()?;
        Ok(sc)
    }
}

/// A parsed config together with the directory it was loaded from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn swarm(&self) -> &SwarmExperiment {
        self.config.swarm.as_ref().expect("resolved swarm config")
    }

    pub fn route(&self) -> &RouteConfig {
        self.config.route.as_ref().expect("resolved route config")
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let config = parse_config(&text, path)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let loaded = LoadedConfig { config, base_dir };
    if loaded.config.kind == Kind::Route {
        // Surface network and scenario errors at load time.
        loaded.route().scenario(&loaded.base_dir, loaded.config.seeds[0])?;
    }
    Ok(loaded)
}

/// Parses, fills defaults and validates. `origin` names the source in errors.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let raw: ExperimentConfig =
        serde_json::from_str(text).map_err(|source| LabError::Parse { path: origin.to_path_buf(), source })?;
    resolve(raw)
}

pub fn resolve(mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(LabError::invalid("schema_version", format!("expected {SCHEMA_VERSION}")));
    }
    if cfg.seeds.is_empty() {
        return Err(LabError::invalid("seeds", "at least one seed is required"));
    }
    match cfg.kind {
        Kind::Swarm => {
            if cfg.route.is_some() {
                return Err(LabError::invalid("route", "not allowed in a swarm config"));
            }
            let swarm = cfg.swarm.get_or_insert_with(SwarmExperiment::default);
            swarm.validate()?;
            if let Some(inj) = &swarm.injection {
                if inj.t_inject >= swarm.steps {
                    return Err(LabError::invalid("swarm.injection.t_inject", "must be before the last step"));
                }
            }
        }
        Kind::Route => {
            if cfg.swarm.is_some() {
                return Err(LabError::invalid("swarm", "not allowed in a route config"));
            }
            cfg.route.get_or_insert_with(RouteConfig::default);
        }
    }
    Ok(cfg)
}

/// Fully defaulted config of the given kind.
pub fn default_config(kind: Kind) -> ExperimentConfig {
    let cfg = ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        kind,
        seeds: default_seeds(),
        output_dir: default_output_dir(),
        swarm: None,
        route: None,
    };
    resolve(cfg).expect("defaults are valid")
}

pub fn to_json(cfg: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serialises")
}
