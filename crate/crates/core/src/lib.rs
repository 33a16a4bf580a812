//! Belief-space collective dynamics and fleet routing under hazard.
//!
//! The crate is `no_std` with `alloc`. It contains the simulation kernels
//! only; file formats, configuration and the command line live in the
//! `stampede-lab` crate.
//!
//! * [`swarm`] advances a population of agents whose velocities align with
//!   neighbours inside a social influence horizon.
//! * [`metrics`] measures order parameters and labels the population as
//!   nomadic, flocking or stampeding.
//! * [`interventions`] injects diverse agents or densifies like-minded links.
//! * [`route`] runs vehicle fleets through a road network with a moving fire
//!   front and A* replanning.
//! * [`experiment`] schedules interventions over a seeded run.
//! * [`presets`] holds the canonical configurations used by tests and the CLI.

#![no_std]
// Negated comparisons are how parameter checks reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod experiment;
pub mod graph;
pub mod interventions;
pub mod metrics;
pub mod params;
pub mod presets;
pub mod route;
pub mod swarm;
pub mod vecmath;

mod agent;

pub use agent::{AgentKind, AgentState};
pub use error::SimError;
pub use graph::{InfluenceGraph, Topology};
pub use metrics::{Phase, PhaseReport, PhaseThresholds};
pub use params::{DynamicsParams, Environment};
pub use swarm::{RunResult, SimRng, SwarmState};
