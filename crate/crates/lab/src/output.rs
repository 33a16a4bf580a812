//! CSV and JSON writers. Every file starts with the resolved config and seeds.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{LabError, Result};

pub const TIMESERIES_SCHEMA: &str = "stampede.timeseries/1";
pub const TIMESERIES_COLUMNS: [&str; 7] =
    ["t", "phi", "velocity_diameter", "participation_ratio", "mean_degree_fraction", "phase", "peeled_count"];

pub const EVENTS_SCHEMA: &str = "stampede.events/1";
pub const EVENTS_COLUMNS: [&str; 5] = ["t_seconds", "event", "edge_id", "vehicle_id", "detail"];

pub const SWEEP_SCHEMA: &str = "stampede.sweep/1";
pub const SWEEP_COLUMNS: [&str; 5] = ["param", "value", "seed", "final_phase", "mean_phi_last_window"];

pub const COMPARE_SCHEMA: &str = "stampede.compare/1";
pub const COMPARE_SWARM_COLUMNS: [&str; 16] = [
    "seed",
    "phi_control",
    "phi_treatment",
    "delta_phi",
    "pr_control",
    "pr_treatment",
    "delta_pr",
    "peeled_control",
    "peeled_treatment",
    "delta_peeled",
    "low_rigidity_peel_control",
    "low_rigidity_peel_treatment",
    "high_rigidity_peel_control",
    "high_rigidity_peel_treatment",
    "first_stampede_control",
    "first_stampede_treatment",
];
pub const COMPARE_ROUTE_COLUMNS: [&str; 13] = [
    "seed",
    "destroyed_control",
    "destroyed_treatment",
    "delta_destroyed",
    "arrived_control",
    "arrived_treatment",
    "delta_arrived",
    "stalled_control",
    "stalled_treatment",
    "first_broadcast_control",
    "first_broadcast_treatment",
    "time_to_reroute_control",
    "time_to_reroute_treatment",
];

/// What produced a file.
#[derive(Debug, Clone, Copy)]
pub struct Provenance<'a> {
    pub command: &'static str,
    pub seeds: &'a [u64],
    pub configs: &'a [&'a ExperimentConfig],
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| LabError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

/// Writes a CSV with `#` comment lines naming schema, command, seeds and config.
pub fn write_csv(
    dir: &Path,
    name: &str,
    schema: &str,
    prov: Provenance<'_>,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut out = create(&path)?;
    let io = |e| LabError::io(&path, e);
    writeln!(out, "# schema: {schema}").map_err(io)?;
    writeln!(out, "# command: {}", prov.command).map_err(io)?;
    writeln!(out, "# seeds: {}", serde_json::to_string(prov.seeds)?).map_err(io)?;
    for cfg in prov.configs {
        writeln!(out, "# config: {}", serde_json::to_string(cfg)?).map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(io)?;
    Ok(path)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'static str,
    seeds: &'a [u64],
    configs: &'a [&'a ExperimentConfig],
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_summary<T: Serialize>(dir: &Path, prov: Provenance<'_>, body: &T) -> Result<PathBuf> {
    let path = dir.join("summary.json");
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: prov.command,
        seeds: prov.seeds,
        configs: prov.configs,
        body,
    };
    let mut out = create(&path)?;
    serde_json::to_writer_pretty(&mut out, &env)?;
    writeln!(out).map_err(|e| LabError::io(&path, e))?;
    out.flush().map_err(|e| LabError::io(&path, e))?;
    Ok(path)
}

pub fn num(x: f64) -> String {
    x.to_string()
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}
