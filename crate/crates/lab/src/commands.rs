//! The four harness commands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use stampede_core::experiment::{SwarmExperiment, SwarmSummary};
use stampede_core::metrics::Phase;
use stampede_core::route::{run_scenario, FleetResult};
use stampede_core::Topology;

use crate::config::{Kind, LoadedConfig};
use crate::error::{LabError, Result};
use crate::output::*;

/// Median; `None` for an empty input. Infinite values sort last.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(v[n / 2]),
        _ => Some(0.5 * (v[n / 2 - 1] + v[n / 2])),
    }
}

/// JSON has no infinity; unreached times become `null`.
fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

#[derive(Serialize)]
struct SwarmRunBody<'a> {
    records: usize,
    summary: &'a SwarmSummary,
}

pub fn swarm_run(cfg: &LoadedConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    require(cfg, Kind::Swarm)?;
    let outcome = cfg.swarm().run(seed)?;
    ensure_dir(out)?;
    let seeds = [seed];
    let prov = Provenance { command: "swarm-run", seeds: &seeds, configs: &[&cfg.config] };
    let rows = outcome.records.iter().map(|r| {
        vec![
            r.t.to_string(),
            num(r.polarization),
            num(r.velocity_diameter),
            num(r.participation_ratio),
            num(r.mean_degree_fraction),
            r.phase.as_str().to_string(),
            r.peeled_count.to_string(),
        ]
    });
    let csv = write_csv(out, "timeseries.csv", TIMESERIES_SCHEMA, prov, &TIMESERIES_COLUMNS, rows)?;
    let body = SwarmRunBody { records: outcome.records.len(), summary: &outcome.summary };
    let json = write_summary(out, prov, &body)?;
    Ok(vec![csv, json])
}

#[derive(Serialize)]
struct RouteRunBody {
    spawned: usize,
    arrived: usize,
    destroyed: usize,
    stalled: usize,
    en_route: usize,
    wrecks_by_edge: Vec<(usize, u32)>,
    first_broadcast: Option<f64>,
    time_to_reroute: Option<f64>,
    events: usize,
}

pub fn route_run(cfg: &LoadedConfig, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    require(cfg, Kind::Route)?;
    let result = run_scenario(cfg.route().scenario(&cfg.base_dir, seed)?)?;
    ensure_dir(out)?;
    let seeds = [seed];
    let prov = Provenance { command: "route-run", seeds: &seeds, configs: &[&cfg.config] };
    let rows = result
        .events
        .iter()
        .map(|e| vec![num(e.t), e.kind.as_str().to_string(), opt(e.edge), opt(e.vehicle), e.detail.clone()]);
    let csv = write_csv(out, "events.csv", EVENTS_SCHEMA, prov, &EVENTS_COLUMNS, rows)?;
    let body = RouteRunBody {
        spawned: result.spawned,
        arrived: result.arrived,
        destroyed: result.destroyed,
        stalled: result.stalled,
        en_route: result.en_route,
        wrecks_by_edge: result.wrecks_by_edge.clone(),
        first_broadcast: result.first_broadcast,
        time_to_reroute: result.time_to_reroute,
        events: result.events.len(),
    };
    let json = write_summary(out, prov, &body)?;
    Ok(vec![csv, json])
}

fn require(cfg: &LoadedConfig, kind: Kind) -> Result<()> {
    if cfg.config.kind == kind {
        Ok(())
    } else {
        Err(LabError::invalid("kind", format!("this command needs a {} config", kind.as_str())))
    }
}

/// Names accepted by [`sweep`].
pub const SWEEP_PARAMS: [&str; 13] = [
    "n",
    "steps",
    "sih_radius",
    "stiffness",
    "kernel_beta",
    "noise_eta",
    "dt",
    "v_max",
    "density_p",
    "similarity_tau",
    "phi_hi",
    "phi_lo",
    "density_hi",
];

/// Sets one numeric parameter on a swarm experiment.
pub fn apply_param(exp: &mut SwarmExperiment, name: &str, value: f64) -> Result<()> {
    let count = |v: f64| {
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as u64)
        } else {
            Err(LabError::invalid(name, "must be a non-negative integer"))
        }
    };
    match name {
        "n" => exp.n = count(value)? as usize,
        "steps" => exp.steps = count(value)?,
        "sih_radius" => exp.dynamics.sih_radius = value,
        "stiffness" => exp.dynamics.stiffness = value,
        "kernel_beta" => exp.dynamics.kernel_beta = value,
        "noise_eta" => exp.dynamics.noise_eta = value,
        "dt" => exp.dynamics.dt = value,
        "v_max" => exp.dynamics.v_max = value,
        "density_p" => match &mut exp.topology {
            Topology::RandomDensity { p } => *p = value,
            _ => return Err(LabError::invalid("density_p", "topology is not random_density")),
        },
        "similarity_tau" => match &mut exp.topology {
            Topology::SimilarityThreshold { tau } => *tau = value,
            _ => return Err(LabError::invalid("similarity_tau", "topology is not similarity_threshold")),
        },
        "phi_hi" => exp.thresholds.phi_hi = value,
        "phi_lo" => exp.thresholds.phi_lo = value,
        "density_hi" => exp.thresholds.density_hi = value,
        other => return Err(LabError::UnknownParam(other.to_string())),
    }
    exp.validate()?;
    Ok(())
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(LabError::invalid("steps", "must be at least 1"));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(LabError::invalid("from/to", "must be finite"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let span = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { to } else { from + span * i as f64 }).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub final_phase: Option<Phase>,
    pub mean_phi_last_window: f64,
}

#[derive(Serialize)]
struct PhaseCounts {
    value: f64,
    nomadic: usize,
    flocking: usize,
    stampede: usize,
}

#[derive(Serialize)]
struct SweepBody<'a> {
    param: &'a str,
    grid: &'a [f64],
    phase_counts: Vec<PhaseCounts>,
}

/// Runs every (value, seed) cell; rows come back sorted by (value, seed).
pub fn sweep_rows(exp: &SwarmExperiment, param: &str, values: &[f64], seeds: &[u64]) -> Result<Vec<SweepRow>> {
    let mut cells = Vec::with_capacity(values.len() * seeds.len());
    for &v in values {
        let mut e = exp.clone();
        apply_param(&mut e, param, v)?;
        for &s in seeds {
            cells.push((v, s, e.clone()));
        }
    }
    let mut rows: Vec<SweepRow> = cells
        .into_par_iter()
        .map(|(value, seed, e)| {
            let o = e.run(seed)?;
            Ok(SweepRow {
                value,
                seed,
                final_phase: o.summary.final_phase,
                mean_phi_last_window: o.summary.mean_phi_last_window,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.seed.cmp(&b.seed)));
    Ok(rows)
}

pub fn sweep(cfg: &LoadedConfig, param: &str, values: &[f64], seeds: &[u64], out: &Path) -> Result<Vec<PathBuf>> {
    require(cfg, Kind::Swarm)?;
    let rows = sweep_rows(cfg.swarm(), param, values, seeds)?;
    ensure_dir(out)?;
    let prov = Provenance { command: "sweep", seeds, configs: &[&cfg.config] };
    let csv_rows = rows.iter().map(|r| {
        vec![
            param.to_string(),
            num(r.value),
            r.seed.to_string(),
            opt(r.final_phase.map(Phase::as_str)),
            num(r.mean_phi_last_window),
        ]
    });
    let csv = write_csv(out, "sweep.csv", SWEEP_SCHEMA, prov, &SWEEP_COLUMNS, csv_rows)?;
    let phase_counts = values
        .iter()
        .map(|&v| {
            let count = |p| rows.iter().filter(|r| r.value == v && r.final_phase == Some(p)).count();
            PhaseCounts {
                value: v,
                nomadic: count(Phase::Nomadic),
                flocking: count(Phase::Flocking),
                stampede: count(Phase::Stampede),
            }
        })
        .collect();
    let json = write_summary(out, prov, &SweepBody { param, grid: values, phase_counts })?;
    Ok(vec![csv, json])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmPair {
    pub seed: u64,
    pub control: SwarmSummaryRow,
    pub treatment: SwarmSummaryRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmSummaryRow {
    pub phi: f64,
    pub participation_ratio: f64,
    pub peeled: usize,
    pub low_rigidity_peel: Option<f64>,
    pub high_rigidity_peel: Option<f64>,
    pub first_stampede: Option<u64>,
}

impl SwarmPair {
    pub fn delta_phi(&self) -> f64 {
        self.treatment.phi - self.control.phi
    }

    pub fn delta_pr(&self) -> f64 {
        self.treatment.participation_ratio - self.control.participation_ratio
    }

    pub fn delta_peeled(&self) -> f64 {
        self.treatment.peeled as f64 - self.control.peeled as f64
    }
}

fn swarm_row(exp: &SwarmExperiment, seed: u64) -> Result<SwarmSummaryRow> {
    let o = exp.run(seed)?;
    let last = o.records.last();
    Ok(SwarmSummaryRow {
        phi: last.map_or(f64::NAN, |r| r.polarization),
        participation_ratio: last.map_or(f64::NAN, |r| r.participation_ratio),
        peeled: last.map_or(0, |r| r.peeled_count),
        low_rigidity_peel: o.summary.peel.map(|p| p.low_rigidity_rate),
        high_rigidity_peel: o.summary.peel.map(|p| p.high_rigidity_rate),
        first_stampede: o.summary.first_stampede_t,
    })
}

/// Paired swarm runs. When only one side injects, the other captures its
/// peel reference direction at the same step so peel counts are comparable.
pub fn compare_swarm(control: &SwarmExperiment, treatment: &SwarmExperiment, seeds: &[u64]) -> Result<Vec<SwarmPair>> {
    let mut c = control.clone();
    let mut t = treatment.clone();
    fill_capture(&mut c, treatment);
    fill_capture(&mut t, control);
    let mut pairs: Vec<SwarmPair> = seeds
        .par_iter()
        .map(|&seed| Ok(SwarmPair { seed, control: swarm_row(&c, seed)?, treatment: swarm_row(&t, seed)? }))
        .collect::<Result<_>>()?;
    pairs.sort_by_key(|p| p.seed);
    Ok(pairs)
}

fn fill_capture(exp: &mut SwarmExperiment, other: &SwarmExperiment) {
    if exp.injection.is_none() && exp.peel.capture_at.is_none() {
        exp.peel.capture_at = other.peel.capture_at.or(other.injection.as_ref().map(|i| i.t_inject));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutePair {
    pub seed: u64,
    pub control: RouteSummaryRow,
    pub treatment: RouteSummaryRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteSummaryRow {
    pub destroyed: usize,
    pub arrived: usize,
    pub stalled: usize,
    pub first_broadcast: Option<f64>,
    pub time_to_reroute: Option<f64>,
}

impl From<&FleetResult> for RouteSummaryRow {
    fn from(r: &FleetResult) -> Self {
        RouteSummaryRow {
            destroyed: r.destroyed,
            arrived: r.arrived,
            stalled: r.stalled,
            first_broadcast: r.first_broadcast,
            time_to_reroute: r.time_to_reroute,
        }
    }
}

impl RoutePair {
    pub fn delta_destroyed(&self) -> f64 {
        self.treatment.destroyed as f64 - self.control.destroyed as f64
    }

    pub fn delta_arrived(&self) -> f64 {
        self.treatment.arrived as f64 - self.control.arrived as f64
    }
}

pub fn compare_route(control: &LoadedConfig, treatment: &LoadedConfig, seeds: &[u64]) -> Result<Vec<RoutePair>> {
    let mut pairs: Vec<RoutePair> = seeds
        .par_iter()
        .map(|&seed| {
            let c = run_scenario(control.route().scenario(&control.base_dir, seed)?)?;
            let t = run_scenario(treatment.route().scenario(&treatment.base_dir, seed)?)?;
            Ok(RoutePair { seed, control: (&c).into(), treatment: (&t).into() })
        })
        .collect::<Result<_>>()?;
    pairs.sort_by_key(|p| p.seed);
    Ok(pairs)
}

#[derive(Serialize)]
struct SwarmCompareBody {
    pairs: usize,
    median_delta_phi: Option<f64>,
    median_delta_participation_ratio: Option<f64>,
    median_delta_peeled: Option<f64>,
    median_low_rigidity_peel_treatment: Option<f64>,
    median_high_rigidity_peel_treatment: Option<f64>,
    /// `null` when the median run never reached a stampede.
    median_first_stampede_control: Option<f64>,
    median_first_stampede_treatment: Option<f64>,
}

#[derive(Serialize)]
struct RouteCompareBody {
    pairs: usize,
    median_delta_destroyed: Option<f64>,
    median_delta_arrived: Option<f64>,
    median_destroyed_control: Option<f64>,
    median_destroyed_treatment: Option<f64>,
}

/// First stampede step with "never" as infinity.
pub fn stampede_time(t: Option<u64>) -> f64 {
    t.map_or(f64::INFINITY, |v| v as f64)
}

pub fn compare(control: &LoadedConfig, treatment: &LoadedConfig, seeds: &[u64], out: &Path) -> Result<Vec<PathBuf>> {
    let (kc, kt) = (control.config.kind, treatment.config.kind);
    if kc != kt {
        return Err(LabError::KindMismatch { control: kc.as_str(), treatment: kt.as_str() });
    }
    let configs = [&control.config, &treatment.config];
    let prov = Provenance { command: "compare", seeds, configs: &configs };
    match kc {
        Kind::Swarm => {
            let pairs = compare_swarm(control.swarm(), treatment.swarm(), seeds)?;
            ensure_dir(out)?;
            let rows = pairs.iter().map(|p| {
                let (c, t) = (&p.control, &p.treatment);
                vec![
                    p.seed.to_string(),
                    num(c.phi),
                    num(t.phi),
                    num(p.delta_phi()),
                    num(c.participation_ratio),
                    num(t.participation_ratio),
                    num(p.delta_pr()),
                    c.peeled.to_string(),
                    t.peeled.to_string(),
                    num(p.delta_peeled()),
                    opt(c.low_rigidity_peel),
                    opt(t.low_rigidity_peel),
                    opt(c.high_rigidity_peel),
                    opt(t.high_rigidity_peel),
                    opt(c.first_stampede),
                    opt(t.first_stampede),
                ]
            });
            let csv = write_csv(out, "compare.csv", COMPARE_SCHEMA, prov, &COMPARE_SWARM_COLUMNS, rows)?;
            let col = |f: &dyn Fn(&SwarmPair) -> f64| median(&pairs.iter().map(f).collect::<Vec<_>>());
            let body = SwarmCompareBody {
                pairs: pairs.len(),
                median_delta_phi: col(&|p| p.delta_phi()),
                median_delta_participation_ratio: col(&|p| p.delta_pr()),
                median_delta_peeled: col(&|p| p.delta_peeled()),
                median_low_rigidity_peel_treatment: col(&|p| p.treatment.low_rigidity_peel.unwrap_or(f64::NAN)),
                median_high_rigidity_peel_treatment: col(&|p| p.treatment.high_rigidity_peel.unwrap_or(f64::NAN)),
                median_first_stampede_control: finite(col(&|p| stampede_time(p.control.first_stampede))),
                median_first_stampede_treatment: finite(col(&|p| stampede_time(p.treatment.first_stampede))),
            };
            let json = write_summary(out, prov, &body)?;
            Ok(vec![csv, json])
        }
        Kind::Route => {
            let pairs = compare_route(control, treatment, seeds)?;
            ensure_dir(out)?;
            let rows = pairs.iter().map(|p| {
                let (c, t) = (&p.control, &p.treatment);
                vec![
                    p.seed.to_string(),
                    c.destroyed.to_string(),
                    t.destroyed.to_string(),
                    num(p.delta_destroyed()),
                    c.arrived.to_string(),
                    t.arrived.to_string(),
                    num(p.delta_arrived()),
                    c.stalled.to_string(),
                    t.stalled.to_string(),
                    opt(c.first_broadcast),
                    opt(t.first_broadcast),
                    opt(c.time_to_reroute),
                    opt(t.time_to_reroute),
                ]
            });
            let csv = write_csv(out, "compare.csv", COMPARE_SCHEMA, prov, &COMPARE_ROUTE_COLUMNS, rows)?;
            let col = |f: &dyn Fn(&RoutePair) -> f64| median(&pairs.iter().map(f).collect::<Vec<_>>());
            let body = RouteCompareBody {
                pairs: pairs.len(),
                median_delta_destroyed: col(&|p| p.delta_destroyed()),
                median_delta_arrived: col(&|p| p.delta_arrived()),
                median_destroyed_control: col(&|p| p.control.destroyed as f64),
                median_destroyed_treatment: col(&|p| p.treatment.destroyed as f64),
            };
            let json = write_summary(out, prov, &body)?;
            Ok(vec![csv, json])
        }
    }
}

/// Parses `N`, `N..M` (half-open), `N..=M` or a comma list.
pub fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    let int = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad seed `{t}`"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..=") {
        (int(a)?..=int(b)?).collect()
    } else if let Some((a, b)) = s.split_once("..") {
        (int(a)?..int(b)?).collect()
    } else {
        s.split(',').map(int).collect::<std::result::Result<_, _>>()?
    };
    if seeds.is_empty() {
        return Err(format!("seed range `{s}` is empty"));
    }
    Ok(seeds)
}
