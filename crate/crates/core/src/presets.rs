//! Canonical configurations.

use alloc::vec::Vec;

use crate::experiment::{ScheduledDensification, SwarmExperiment};
use crate::graph::Topology;
use crate::interventions::{InjectionSpec, InjectionStrategy, VelocityMode};
use crate::metrics::PhaseThresholds;
use crate::params::DynamicsParams;
use crate::route::{EdgeSpec, FleetScenario, HazardFront, RoadNetwork};

/// Complete graph, full coupling, no noise: aligns within a few dozen steps.
pub fn stampede() -> SwarmExperiment {
    SwarmExperiment {
        n: 50,
        steps: 500,
        topology: Topology::Complete,
        dynamics: DynamicsParams { stiffness: 1.0, kernel_beta: 0.25, noise_eta: 0.0, ..Default::default() },
        ..Default::default()
    }
}

/// Zero horizon with exploration noise.
pub fn nomadic() -> SwarmExperiment {
    SwarmExperiment {
        n: 100,
        steps: 500,
        topology: Topology::Complete,
        dynamics: DynamicsParams { sih_radius: 0.0, noise_eta: 0.05, ..Default::default() },
        ..Default::default()
    }
}

/// Sparse random graph: aligned but not stiffly connected.
pub fn flocking() -> SwarmExperiment {
    SwarmExperiment {
        n: 50,
        steps: 400,
        topology: Topology::RandomDensity { p: 0.3 },
        dynamics: DynamicsParams { noise_eta: 0.05, ..Default::default() },
        ..Default::default()
    }
}

/// Uniform-rigidity alignment used for consensus checks.
pub fn consensus() -> SwarmExperiment {
    SwarmExperiment {
        n: 50,
        steps: 2000,
        topology: Topology::Complete,
        dynamics: DynamicsParams { stiffness: 1.0, kernel_beta: 0.25, noise_eta: 0.0, dt: 0.05, ..Default::default() },
        uniform_rigidity: Some(1.0),
        ..Default::default()
    }
}

/// Base for sweeping `sih_radius` across the three phases.
///
/// A G(n, 0.3) graph caps the mean degree fraction near 0.3, so the density
/// threshold is lowered to 0.25.
pub fn phase_sweep() -> SwarmExperiment {
    SwarmExperiment {
        n: 100,
        steps: 400,
        topology: Topology::RandomDensity { p: 0.3 },
        dynamics: DynamicsParams { noise_eta: 0.05, ..Default::default() },
        thresholds: PhaseThresholds { density_hi: 0.25, ..Default::default() },
        ..Default::default()
    }
}

/// `sih_radius` values for [`phase_sweep`].
pub fn phase_sweep_grid() -> Vec<f64> {
    (0..12).map(|i| 4.0 * i as f64).collect()
}

/// Stampede with ten antipodal feed items at step 200, run to step 400.
pub fn diversity_injection() -> SwarmExperiment {
    SwarmExperiment {
        steps: 400,
        injection: Some(InjectionSpec {
            m: 10,
            strategy: InjectionStrategy::Feed,
            t_inject: 200,
            placement_spread: 1.0,
            velocity_mode: VelocityMode::Antipodal,
        }),
        ..stampede()
    }
}

/// Flocking with like-minded edges added at step 100.
pub fn densification_attack() -> SwarmExperiment {
    SwarmExperiment {
        densification: Some(ScheduledDensification { at: 100, similarity_tau: 15.0, added_edges: 400, push_gain: 0.0 }),
        ..flocking()
    }
}

/// Three-node corridor whose first edge burns from the start, so every
/// vehicle must cross fire: source 0, destination 2, fire on edge 0.
pub fn wreck_corridor() -> FleetScenario {
    let network =
        RoadNetwork::new(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], &[EdgeSpec::straight(0, 1), EdgeSpec::straight(1, 2)])
            .expect("corridor is well formed");
    FleetScenario {
        network,
        hazard: Some(HazardFront { origin: [0.6, 0.0], direction: [1.0, 0.0], speed: 0.0, t0: 0.0 }),
        source: 0,
        destination: 2,
        spawn_rate: 3.5,
        model_b_fraction: 0.0,
        p_block: 0.0,
        wreck_threshold: 20,
        vehicle_speed: 1.0,
        dt: 0.1,
        horizon: 30.0,
        seed: 0,
        forced_stall: None,
    }
}

/// Straight road with edge midpoints every 2 miles from the front origin,
/// under a front covering 10 miles every 30 minutes.
pub fn front_corridor() -> FleetScenario {
    let xs: Vec<(f64, f64)> = (0..7).map(|i| (2.0 * i as f64 - 1.0, 0.0)).collect();
    let edges: Vec<EdgeSpec> = (0..6).map(|i| EdgeSpec::straight(i + 1, i)).collect();
    let network = RoadNetwork::new(&xs, &edges).expect("corridor is well formed");
    FleetScenario {
        network,
        hazard: Some(HazardFront { origin: [0.0, 0.0], direction: [1.0, 0.0], speed: 1.0 / 3.0, t0: 0.0 }),
        source: 6,
        destination: 0,
        spawn_rate: 0.01,
        model_b_fraction: 0.0,
        p_block: 0.0,
        wreck_threshold: 20,
        vehicle_speed: 1.0,
        dt: 1.0,
        horizon: 1860.0,
        seed: 0,
        forced_stall: None,
    }
}

/// Node ids of [`evacuation`].
pub mod evac {
    pub const SOURCE: usize = 0;
    pub const RIDGE_WEST: usize = 1;
    pub const RIDGE_EAST: usize = 2;
    pub const DESTINATION: usize = 4;
    /// The ridge road between the two ridge nodes, burning from the start.
    pub const FIRE_EDGE: usize = 1;
}

/// Evacuation network: an officially closed freeway, a short ridge road
/// with fire on it, and a longer detour.
pub fn evacuation() -> FleetScenario {
    let nodes = [
        (0.0, 0.0),  // 0 source
        (1.0, 1.5),  // 1 ridge west
        (3.0, 1.5),  // 2 ridge east
        (5.0, 1.0),  // 3
        (6.0, 0.0),  // 4 destination
        (3.0, 0.0),  // 5 freeway midpoint
        (1.0, -2.0), // 6 detour west
        (5.0, -2.0), // 7 detour east
    ];
    let closed = |a, b| EdgeSpec { closed_official: true, ..EdgeSpec::straight(a, b) };
    let edges = [
        EdgeSpec::straight(0, 1),
        EdgeSpec::straight(1, 2),
        EdgeSpec::straight(2, 3),
        EdgeSpec::straight(3, 4),
        closed(0, 5),
        closed(5, 4),
        EdgeSpec::straight(0, 6),
        EdgeSpec::straight(6, 7),
        EdgeSpec::straight(7, 4),
    ];
    let network = RoadNetwork::new(&nodes, &edges).expect("evacuation network is well formed");
    FleetScenario {
        network,
        // Stationary front along y = 1.4; only the ridge road lies beyond it.
        hazard: Some(HazardFront { origin: [0.0, 1.4], direction: [0.0, -1.0], speed: 0.0, t0: 0.0 }),
        source: evac::SOURCE,
        destination: evac::DESTINATION,
        spawn_rate: 3.5,
        model_b_fraction: 0.0,
        p_block: 0.0,
        wreck_threshold: 20,
        vehicle_speed: 1.0,
        dt: 0.1,
        horizon: 900.0,
        seed: 0,
        forced_stall: None,
    }
}

/// [`evacuation`] with one in ten vehicles able to stall and block.
pub fn evacuation_diverse() -> FleetScenario {
    FleetScenario { model_b_fraction: 0.1, p_block: 0.5, ..evacuation() }
}
