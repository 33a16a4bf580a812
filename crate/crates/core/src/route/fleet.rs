use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::astar::{astar_route, Route};
use super::hazard::{advance_hazard, HazardFront};
use super::network::{EdgeId, NodeId, RoadEdge, RoadNetwork};
use super::RouteError;

/// Driver behaviour on entering a burning road.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VehicleModel {
    /// Always driven through and destroyed.
    A,
    /// Stalls with probability `p_block`, closing the road behind it.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum VehicleStatus {
    EnRoute,
    Arrived,
    Destroyed,
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: usize,
    pub model: VehicleModel,
    /// Remaining nodes; `route[0]` is the node last reached.
    pub route: Vec<NodeId>,
    /// Edges joining consecutive entries of `route`.
    pub route_edges: Vec<EdgeId>,
    /// Miles driven along `route_edges[0]`.
    pub edge_progress: f64,
    pub status: VehicleStatus,
    /// True when no passable route exists; the vehicle waits at its next node.
    pub holding: bool,
}

impl Vehicle {
    fn on_edge(&self) -> bool {
        self.edge_progress > 0.0
    }

    /// Node from which a new route would start.
    fn replan_origin(&self) -> NodeId {
        if self.on_edge() {
            self.route[1]
        } else {
            self.route[0]
        }
    }

    /// Edges still ahead, excluding one already being driven.
    fn edges_ahead(&self) -> &[EdgeId] {
        if self.on_edge() {
            &self.route_edges[1..]
        } else {
            &self.route_edges
        }
    }
}

/// Whether a vehicle's planner treats `edge` as usable. Drivers only learn
/// about fire through official closures, broadcasts and physical blockage.
pub fn perceive_model_a(edge: &RoadEdge) -> bool {
    !(edge.closed_official || edge.closed_broadcast || edge.blocked)
}

/// Both models plan with the same information; they differ only on entry to a burning road.
pub fn perceive(_model: VehicleModel, edge: &RoadEdge) -> bool {
    perceive_model_a(edge)
}

/// Evacuation run definition. Times are in seconds, distances in miles.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetScenario {
    pub network: RoadNetwork,
    pub hazard: Option<HazardFront>,
    pub source: NodeId,
    pub destination: NodeId,
    /// Vehicles per second.
    pub spawn_rate: f64,
    pub model_b_fraction: f64,
    pub p_block: f64,
    /// Wrecks on one edge that trigger a broadcast closure.
    pub wreck_threshold: u32,
    /// Miles per minute.
    pub vehicle_speed: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    /// Forces the n-th entry (1-based) onto a burning road to stall,
    /// regardless of model.
    pub forced_stall: Option<u32>,
}

impl FleetScenario {
    pub fn validate(&self) -> Result<(), RouteError> {
        let bad = |field, reason| Err(RouteError::InvalidScenario { field, reason });
        self.network.node(self.source)?;
        self.network.node(self.destination)?;
        if !(self.spawn_rate > 0.0 && self.spawn_rate.is_finite()) {
            return bad("spawn_rate", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.model_b_fraction) {
            return bad("model_b_fraction", "must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.p_block) {
            return bad("p_block", "must be in [0, 1]");
        }
        if self.wreck_threshold == 0 {
            return bad("wreck_threshold", "must be at least 1");
        }
        if !(self.vehicle_speed > 0.0 && self.vehicle_speed.is_finite()) {
            return bad("vehicle_speed", "must be positive");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", "must be positive");
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return bad("horizon", "must be finite and >= 0");
        }
        if self.forced_stall == Some(0) {
            return bad("forced_stall", "entries are counted from 1");
        }
        Ok(())
    }

    /// Number of whole ticks within the horizon.
    pub fn ticks(&self) -> u64 {
        libm::floor(self.horizon / self.dt + 1e-9) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum EventKind {
    Ignite,
    Spawn,
    Plan,
    NoRoute,
    Destroyed,
    Stalled,
    Arrived,
    BroadcastClose,
    Replan,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Ignite => "ignite",
            EventKind::Spawn => "spawn",
            EventKind::Plan => "plan",
            EventKind::NoRoute => "no_route",
            EventKind::Destroyed => "destroyed",
            EventKind::Stalled => "stalled",
            EventKind::Arrived => "arrived",
            EventKind::BroadcastClose => "broadcast_close",
            EventKind::Replan => "replan",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Event {
    /// Seconds.
    pub t: f64,
    pub kind: EventKind,
    pub edge: Option<EdgeId>,
    pub vehicle: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FleetResult {
    pub spawned: usize,
    pub arrived: usize,
    pub destroyed: usize,
    pub stalled: usize,
    pub en_route: usize,
    /// `(edge, wrecks)` for every edge with at least one wreck.
    pub wrecks_by_edge: Vec<(EdgeId, u32)>,
    pub first_broadcast: Option<f64>,
    /// First replan whose new route avoids every burning road.
    pub time_to_reroute: Option<f64>,
    pub events: Vec<Event>,
}

/// Tick-by-tick fleet simulation.
///
/// Each tick at time t: ignite edges under the front (vehicles on them are
/// caught), spawn, plan new vehicles, advance everyone, broadcast edges
/// whose wreck count reached the threshold, then replan vehicles whose
/// remaining route became unusable. Replans take effect from the next tick
/// and are logged at t + dt.
#[derive(Debug, Clone)]
pub struct FleetSim {
    scenario: FleetScenario,
    rng: ChaCha8Rng,
    tick: u64,
    vehicles: Vec<Vehicle>,
    events: Vec<Event>,
    ignited_entries: u32,
    first_broadcast: Option<f64>,
    time_to_reroute: Option<f64>,
}

impl FleetSim {
    pub fn new(scenario: FleetScenario) -> Result<Self, RouteError> {
        scenario.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        Ok(FleetSim {
            scenario,
            rng,
            tick: 0,
            vehicles: Vec::new(),
            events: Vec::new(),
            ignited_entries: 0,
            first_broadcast: None,
            time_to_reroute: None,
        })
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.scenario.network
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Start time of the next tick.
    pub fn time(&self) -> f64 {
        self.tick as f64 * self.scenario.dt
    }

    fn log(&mut self, t: f64, kind: EventKind, edge: Option<EdgeId>, vehicle: Option<usize>, detail: String) {
        self.events.push(Event { t, kind, edge, vehicle, detail });
    }

    pub fn tick(&mut self) {
        let t = self.time();
        self.burn(t);
        let first_new = self.vehicles.len();
        self.spawn(t);
        for v in first_new..self.vehicles.len() {
            self.plan_new(v, t);
        }
        for v in 0..self.vehicles.len() {
            self.advance(v, t);
        }
        self.broadcast(t);
        let t_next = t + self.scenario.dt;
        for v in 0..self.vehicles.len() {
            self.replan(v, t_next);
        }
        self.tick += 1;
    }

    fn burn(&mut self, t: f64) {
        let Some(hazard) = self.scenario.hazard else {
            return;
        };
        for e in advance_hazard(&mut self.scenario.network, &hazard, t) {
            self.log(t, EventKind::Ignite, Some(e), None, String::new());
            for v in 0..self.vehicles.len() {
                let veh = &self.vehicles[v];
                if veh.status == VehicleStatus::EnRoute && veh.on_edge() && veh.route_edges[0] == e {
                    self.catch(v, e, t, false);
                }
            }
        }
    }

    /// Vehicle `v` is on burning edge `e`: it stalls or is destroyed.
    fn catch(&mut self, v: usize, e: EdgeId, t: f64, entering: bool) {
        let mut stall = false;
        if entering {
            self.ignited_entries += 1;
            stall = self.scenario.forced_stall == Some(self.ignited_entries);
        }
        if !stall && self.vehicles[v].model == VehicleModel::B {
            stall = self.rng.random::<f64>() < self.scenario.p_block;
        }
        if stall {
            self.vehicles[v].status = VehicleStatus::Stalled;
            self.scenario.network.block(e);
            self.log(t, EventKind::Stalled, Some(e), Some(v), String::new());
        } else {
            self.vehicles[v].status = VehicleStatus::Destroyed;
            self.scenario.network.add_wreck(e);
            let count = self.scenario.network.edge(e).wreck_count;
            self.log(t, EventKind::Destroyed, Some(e), Some(v), format!("wrecks={count}"));
        }
    }

    fn spawn(&mut self, t: f64) {
        let sc = &self.scenario;
        let target = libm::floor((self.tick + 1) as f64 * sc.spawn_rate * sc.dt + 1e-9) as usize;
        while self.vehicles.len() < target {
            // The model draw is unconditional so paired runs stay in step.
            let u: f64 = self.rng.random();
            let model = if u < self.scenario.model_b_fraction { VehicleModel::B } else { VehicleModel::A };
            let id = self.vehicles.len();
            self.vehicles.push(Vehicle {
                id,
                model,
                route: alloc::vec![self.scenario.source],
                route_edges: Vec::new(),
                edge_progress: 0.0,
                status: VehicleStatus::EnRoute,
                holding: false,
            });
            let detail = format!("model={model:?}");
            self.log(t, EventKind::Spawn, None, Some(id), detail);
        }
    }

    fn find_route(&self, v: usize, from: NodeId) -> Result<Route, RouteError> {
        let model = self.vehicles[v].model;
        astar_route(&self.scenario.network, from, self.scenario.destination, |e| perceive(model, e))
    }

    fn plan_new(&mut self, v: usize, t: f64) {
        let from = self.scenario.source;
        if from == self.scenario.destination {
            self.vehicles[v].status = VehicleStatus::Arrived;
            self.log(t, EventKind::Arrived, None, Some(v), String::new());
            return;
        }
        match self.find_route(v, from) {
            Ok(route) => {
                let detail = route_detail(&route);
                self.adopt(v, route);
                self.log(t, EventKind::Plan, None, Some(v), detail);
            }
            Err(_) => {
                self.vehicles[v].holding = true;
                self.log(t, EventKind::NoRoute, None, Some(v), String::new());
            }
        }
    }

    /// Replaces everything after the current edge (if any) with `route`.
    fn adopt(&mut self, v: usize, route: Route) {
        let veh = &mut self.vehicles[v];
        if veh.on_edge() {
            veh.route.truncate(2);
            veh.route_edges.truncate(1);
            veh.route.extend_from_slice(&route.nodes[1..]);
        } else {
            veh.route = route.nodes;
            veh.route_edges.clear();
        }
        veh.route_edges.extend_from_slice(&route.edges);
        veh.holding = false;
    }

    fn advance(&mut self, v: usize, t: f64) {
        if self.vehicles[v].status != VehicleStatus::EnRoute {
            return;
        }
        let mut budget = self.scenario.vehicle_speed * self.scenario.dt / 60.0;
        loop {
            let veh = &self.vehicles[v];
            let Some(&e) = veh.route_edges.first() else {
                if veh.route[0] == self.scenario.destination {
                    self.vehicles[v].status = VehicleStatus::Arrived;
                    self.log(t, EventKind::Arrived, None, Some(v), String::new());
                }
                return;
            };
            if !veh.on_edge() {
                let edge = self.scenario.network.edge(e);
                if !perceive(veh.model, edge) {
                    // Wait at the node for a replan.
                    return;
                }
                if edge.ignited {
                    self.catch(v, e, t, true);
                    return;
                }
            }
            let length = self.scenario.network.edge(e).length;
            let veh = &mut self.vehicles[v];
            let left = length - veh.edge_progress;
            if budget < left {
                veh.edge_progress += budget;
                return;
            }
            budget -= left;
            veh.edge_progress = 0.0;
            veh.route.remove(0);
            veh.route_edges.remove(0);
        }
    }

    fn broadcast(&mut self, t: f64) {
        let w = self.scenario.wreck_threshold;
        for e in 0..self.scenario.network.edges().len() {
            let edge = self.scenario.network.edge(e);
            let wrecks = edge.wreck_count;
            if wrecks >= w && !edge.closed_broadcast {
                self.scenario.network.close_broadcast(e);
                self.first_broadcast.get_or_insert(t);
                let detail = format!("wrecks={wrecks}");
                self.log(t, EventKind::BroadcastClose, Some(e), None, detail);
            }
        }
    }

    fn replan(&mut self, v: usize, t: f64) {
        let veh = &self.vehicles[v];
        if veh.status != VehicleStatus::EnRoute {
            return;
        }
        let net = &self.scenario.network;
        let needed = veh.holding || veh.edges_ahead().iter().any(|&e| !perceive(veh.model, net.edge(e)));
        if !needed {
            return;
        }
        let was_holding = veh.holding;
        match self.find_route(v, veh.replan_origin()) {
            Ok(route) => {
                let fire_free = route.edges.iter().all(|&e| !self.scenario.network.edge(e).ignited);
                if fire_free {
                    self.time_to_reroute.get_or_insert(t);
                }
                let detail = format!("{};fire_free={fire_free}", route_detail(&route));
                self.adopt(v, route);
                self.log(t, EventKind::Replan, None, Some(v), detail);
            }
            Err(_) => {
                let veh = &mut self.vehicles[v];
                veh.holding = true;
                // Drop the unusable tail; a vehicle mid-edge still finishes that edge.
                let keep = usize::from(veh.on_edge());
                veh.route.truncate(keep + 1);
                veh.route_edges.truncate(keep);
                if !was_holding {
                    self.log(t, EventKind::NoRoute, None, Some(v), String::new());
                }
            }
        }
    }

    pub fn result(&self) -> FleetResult {
        let count = |s| self.vehicles.iter().filter(|v| v.status == s).count();
        FleetResult {
            spawned: self.vehicles.len(),
            arrived: count(VehicleStatus::Arrived),
            destroyed: count(VehicleStatus::Destroyed),
            stalled: count(VehicleStatus::Stalled),
            en_route: count(VehicleStatus::EnRoute),
            wrecks_by_edge: self
                .scenario
                .network
                .edges()
                .iter()
                .filter(|e| e.wreck_count > 0)
                .map(|e| (e.id, e.wreck_count))
                .collect(),
            first_broadcast: self.first_broadcast,
            time_to_reroute: self.time_to_reroute,
            events: self.events.clone(),
        }
    }
}

fn route_detail(route: &Route) -> String {
    let mut s = format!("cost={:.4};route=", route.cost);
    for (i, n) in route.nodes.iter().enumerate() {
        if i > 0 {
            s.push('-');
        }
        s.push_str(&format!("{n}"));
    }
    s
}

/// Runs a scenario over its whole horizon.
pub fn run_scenario(scenario: FleetScenario) -> Result<FleetResult, RouteError> {
    let ticks = scenario.ticks();
    let mut sim = FleetSim::new(scenario)?;
    for _ in 0..ticks {
        sim.tick();
    }
    Ok(sim.result())
}
