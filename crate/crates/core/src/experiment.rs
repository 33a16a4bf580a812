//! A seeded swarm run with scheduled interventions and phase recording.

use alloc::vec::Vec;

use crate::error::SimError;
use crate::graph::Topology;
use crate::interventions::{densify_likeminded, inject_diversity, DensificationSpec, InjectionSpec};
use crate::metrics::{PeelStats, PeelTracker, Phase, PhaseRecorder, PhaseReport, PhaseThresholds};
use crate::params::DynamicsParams;
use crate::swarm::{init_population, Recorder, SwarmState};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(deny_unknown_fields))]
pub struct ScheduledDensification {
    pub at: u64,
    pub similarity_tau: f64,
    pub added_edges: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub push_gain: f64,
}

impl ScheduledDensification {
    pub fn spec(&self) -> DensificationSpec {
        DensificationSpec {
            similarity_tau: self.similarity_tau,
            added_edges: self.added_edges,
            push_gain: self.push_gain,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct PeelSettings {
    pub theta_deg: f64,
    pub t_peel: u32,
    /// Step at which the herd direction is captured; defaults to the
    /// injection step when an injection is scheduled.
    pub capture_at: Option<u64>,
}

impl Default for PeelSettings {
    fn default() -> Self {
        PeelSettings { theta_deg: 60.0, t_peel: crate::metrics::DEFAULT_T_PEEL, capture_at: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct SwarmExperiment {
    pub n: usize,
    pub steps: u64,
    pub topology: Topology,
    pub dynamics: DynamicsParams,
    /// Overrides every drawn rigidity after initialisation.
    pub uniform_rigidity: Option<f64>,
    pub thresholds: PhaseThresholds,
    pub injection: Option<InjectionSpec>,
    pub densification: Option<ScheduledDensification>,
    pub peel: PeelSettings,
}

impl Default for SwarmExperiment {
    fn default() -> Self {
        SwarmExperiment {
            n: 50,
            steps: 500,
            topology: Topology::Complete,
            dynamics: DynamicsParams::default(),
            uniform_rigidity: None,
            thresholds: PhaseThresholds::default(),
            injection: None,
            densification: None,
            peel: PeelSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SwarmSummary {
    pub final_phase: Option<Phase>,
    pub min_phi: f64,
    pub max_phi: f64,
    /// Mean polarization over the last `thresholds.window` records.
    pub mean_phi_last_window: f64,
    pub final_participation_ratio: f64,
    pub first_stampede_t: Option<u64>,
    pub peel: Option<PeelStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmOutcome {
    pub records: Vec<PhaseReport>,
    pub summary: SwarmSummary,
    pub state: SwarmState,
}

impl SwarmExperiment {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::EmptyPopulation);
        }
        self.dynamics.validate()?;
        self.topology.validate()?;
        self.thresholds.validate()?;
        if let Some(r) = self.uniform_rigidity {
            if !(0.0..=1.0).contains(&r) {
                return Err(SimError::param("uniform_rigidity", "must lie in [0, 1]"));
            }
        }
        if !(self.peel.theta_deg >= 0.0 && self.peel.theta_deg <= 180.0) {
            return Err(SimError::param("peel.theta_deg", "must lie in [0, 180]"));
        }
        Ok(())
    }

    fn capture_step(&self) -> Option<u64> {
        self.peel.capture_at.or(self.injection.as_ref().map(|i| i.t_inject))
    }

    /// Runs the experiment for one seed.
    ///
    /// Interventions and peel capture scheduled for step `t` happen before
    /// the update that produces the record for `t + 1`.
    pub fn run(&self, seed: u64) -> Result<SwarmOutcome, SimError> {
        self.validate()?;
        let mut state = init_population(self.n, self.dynamics.clone(), self.topology, seed)?;
        if let Some(r) = self.uniform_rigidity {
            state.agents.iter_mut().for_each(|a| a.rigidity = r);
        }
        let mut recorder = PhaseRecorder::new(self.thresholds.clone());
        let mut records = Vec::with_capacity(self.steps as usize);
        let capture = self.capture_step();
        for _ in 0..self.steps {
            if capture == Some(state.t) {
                let theta = self.peel.theta_deg.to_radians();
                recorder.arm_peel(PeelTracker::capture(&state, theta, self.peel.t_peel)?);
            }
            if let Some(spec) = self.injection.as_ref().filter(|s| s.t_inject == state.t) {
                inject_diversity(&mut state, spec)?;
            }
            if let Some(d) = self.densification.as_ref().filter(|d| d.at == state.t) {
                densify_likeminded(&mut state, &d.spec())?;
            }
            state.step();
            records.push(recorder.record(&state));
        }
        let summary = summarize(&records, &self.thresholds, recorder.peel().map(|p| p.stats()));
        Ok(SwarmOutcome { records, summary, state })
    }
}

pub fn summarize(records: &[PhaseReport], th: &PhaseThresholds, peel: Option<PeelStats>) -> SwarmSummary {
    let phis = records.iter().map(|r| r.polarization);
    let tail = &records[records.len().saturating_sub(th.window)..];
    SwarmSummary {
        final_phase: records.last().map(|r| r.phase),
        min_phi: phis.clone().fold(f64::NAN, f64::min),
        max_phi: phis.fold(f64::NAN, f64::max),
        mean_phi_last_window: if tail.is_empty() {
            f64::NAN
        } else {
            tail.iter().map(|r| r.polarization).sum::<f64>() / tail.len() as f64
        },
        final_participation_ratio: records.last().map_or(f64::NAN, |r| r.participation_ratio),
        first_stampede_t: records.iter().find(|r| r.phase == Phase::Stampede).map(|r| r.t),
        peel,
    }
}
