//! Fleet routing under a moving fire front.
//!
//! Vehicles leave a source node at a fixed rate and follow A* routes to a
//! destination. Hazard-blind vehicles drive into ignited roads; once enough
//! wrecks pile up on an edge it is broadcast as closed and the fleet
//! replans. Failure-prone vehicles may instead stall on the burning road,
//! blocking it immediately.

mod astar;
mod fleet;
mod hazard;
mod network;

pub use astar::{astar_route, Route};
pub use fleet::{
    perceive, perceive_model_a, run_scenario, Event, EventKind, FleetResult, FleetScenario, FleetSim, Vehicle,
    VehicleModel, VehicleStatus,
};
pub use hazard::{advance_hazard, HazardFront};
pub use network::{EdgeId, EdgeSpec, NodeId, RoadEdge, RoadNetwork, RoadNode};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouteError {
    #[error("no passable route from node {src} to node {dst}")]
    NoRoute { src: NodeId, dst: NodeId },
    #[error("node {0} does not exist")]
    InvalidNode(NodeId),
    #[error("invalid road network: {0}")]
    InvalidNetwork(&'static str),
    #[error("edge {edge} is shorter than the straight-line distance between its endpoints")]
    ShortEdge { edge: EdgeId },
    #[error("road network is not connected")]
    Disconnected,
    #[error("invalid scenario `{field}`: {reason}")]
    InvalidScenario { field: &'static str, reason: &'static str },
}
