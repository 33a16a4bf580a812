//! Population state and the synchronous belief-space update.
//!
//! Each regular agent aligns its velocity with the neighbours it can see:
//!
//! ```text
//! v_i <- clamp(v_i + dt * (F_social(i) + eta * xi_i + F_env(x_i)), v_max)
//! x_i <- x_i + dt * v_i
//! F_social(i) = stiffness * sum_j a_i(j) * psi(|x_j - x_i|) * (v_j - v_i)
//! ```
//!
//! `a_i(j)` is the agent's rigidity for regular neighbours and one minus the
//! rigidity for injected or feed-visible neighbours. All social forces are
//! evaluated on the pre-step state.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::agent::{AgentKind, AgentState};
use crate::error::SimError;
use crate::graph::{InfluenceGraph, Topology};
use crate::params::{DynamicsParams, Environment};
use crate::vecmath::{clamp_norm, distance, norm};

/// The single pseudo-random stream owned by a run.
pub type SimRng = ChaCha8Rng;

/// An intervention applied to the state, kept for provenance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterventionEntry {
    pub t: u64,
    pub kind: InterventionKind,
    /// Agents injected or edges added; zero for a no-op.
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum InterventionKind {
    Injection,
    Densification,
    RemoveInjection,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SwarmState {
    pub agents: Vec<AgentState>,
    pub graph: InfluenceGraph,
    pub params: DynamicsParams,
    pub t: u64,
    pub rng: SimRng,
    /// Agents visible to everyone regardless of graph and horizon.
    pub feed_set: BTreeSet<usize>,
    pub interventions: Vec<InterventionEntry>,
}

/// Communication kernel `(1 + r^2)^-beta`.
pub fn communication_kernel(r: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    libm::pow(1.0 + r * r, -beta)
}

/// External force at position `x`. Reflection is applied in [`SwarmState::step`].
pub fn env_force(params: &DynamicsParams, x: &[f64]) -> Vec<f64> {
    match &params.env {
        Environment::Attractor { goal, gain } => {
            let d: Vec<f64> = goal.iter().zip(x).map(|(g, xi)| g - xi).collect();
            let r = norm(&d);
            if r == 0.0 {
                return vec![0.0; x.len()];
            }
            d.into_iter().map(|c| gain * c / r).collect()
        }
        Environment::None | Environment::ReflectingBox { .. } => vec![0.0; x.len()],
    }
}

/// Draws a fresh population.
///
/// Per agent, in id order: position uniform in `[-L, L]^k`, velocity uniform
/// in `[-1, 1]^k` clamped to `v_max`, rigidity uniform in `[0, 1)`. The graph
/// is built afterwards from the same stream.
pub fn init_population(
    n: usize,
    params: DynamicsParams,
    topology: Topology,
    seed: u64,
) -> Result<SwarmState, SimError> {
    if n == 0 {
        return Err(SimError::EmptyPopulation);
    }
    params.validate()?;
    topology.validate()?;
    let mut rng = SimRng::seed_from_u64(seed);
    let half = params.env.half_width();
    let k = params.k;
    let agents: Vec<AgentState> = (0..n)
        .map(|id| {
            let x = (0..k).map(|_| rng.random_range(-half..=half)).collect();
            let mut v: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..=1.0)).collect();
            clamp_norm(&mut v, params.v_max);
            let rigidity = rng.random::<f64>();
            AgentState { id, x, v, rigidity, kind: AgentKind::Regular }
        })
        .collect();
    let positions: Vec<&[f64]> = agents.iter().map(|a| a.x.as_slice()).collect();
    let graph = InfluenceGraph::build(topology, &positions, &mut rng)?;
    Ok(SwarmState { agents, graph, params, t: 0, rng, feed_set: BTreeSet::new(), interventions: Vec::new() })
}

/// Consumes per-step snapshots of a run.
pub trait Recorder {
    type Record;
    fn record(&mut self, state: &SwarmState) -> Self::Record;
}

/// Scalar summary of the state at the end of a run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateSummary {
    pub t: u64,
    pub regular: usize,
    pub injected: usize,
    pub feed_size: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunResult<R> {
    pub records: Vec<R>,
    pub summary: StateSummary,
}

impl SwarmState {
    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn regular(&self) -> impl Iterator<Item = &AgentState> {
        self.agents.iter().filter(|a| a.is_regular())
    }

    pub fn regular_count(&self) -> usize {
        self.regular().count()
    }

    fn check_id(&self, i: usize) -> Result<(), SimError> {
        if i < self.agents.len() {
            Ok(())
        } else {
            Err(SimError::InvalidAgent(i))
        }
    }

    /// Whether agent `j` draws the non-rigid share of attention.
    fn is_diverse(&self, j: usize) -> bool {
        self.agents[j].kind == AgentKind::Injected || self.feed_set.contains(&j)
    }

    fn sees(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        if self.feed_set.contains(&j) {
            return true;
        }
        self.graph.connected(i, j) && distance(&self.agents[i].x, &self.agents[j].x) <= self.params.sih_radius
    }

    /// Ids visible to agent `i`, ascending.
    pub fn effective_neighbors(&self, i: usize) -> Result<Vec<usize>, SimError> {
        self.check_id(i)?;
        Ok((0..self.n()).filter(|&j| self.sees(i, j)).collect())
    }

    pub fn social_force(&self, i: usize) -> Result<Vec<f64>, SimError> {
        self.check_id(i)?;
        let order = self.canonical_order();
        let mut f = vec![0.0; self.params.k];
        self.accumulate_social(i, &order, &mut f);
        Ok(f)
    }

    /// Agent indices sorted by state rather than id, so that the summation
    /// order of neighbour terms does not depend on labelling.
    fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        let cmp_slice = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
        };
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&self.agents[a], &self.agents[b]);
            cmp_slice(&sa.x, &sb.x)
                .then_with(|| cmp_slice(&sa.v, &sb.v))
                .then_with(|| self.is_diverse(a).cmp(&self.is_diverse(b)))
        });
        order
    }

    fn accumulate_social(&self, i: usize, order: &[usize], out: &mut [f64]) {
        let p = &self.params;
        if p.stiffness == 0.0 {
            return;
        }
        let me = &self.agents[i];
        for &j in order {
            if !self.sees(i, j) {
                continue;
            }
            let other = &self.agents[j];
            let attention = if self.is_diverse(j) { 1.0 - me.rigidity } else { me.rigidity };
            let w = p.stiffness * attention * communication_kernel(distance(&me.x, &other.x), p.kernel_beta);
            for ((o, vj), vi) in out.iter_mut().zip(&other.v).zip(&me.v) {
                *o += w * (vj - vi);
            }
        }
    }

    /// Advances the population by one synchronous explicit-Euler step.
    ///
    /// Injected agents keep their velocity and draw no noise; every regular
    /// agent draws `k` standard normals, in id order.
    pub fn step(&mut self) {
        let k = self.params.k;
        let dt = self.params.dt;
        let eta = self.params.noise_eta;
        let order = self.canonical_order();
        let mut new_v: Vec<Vec<f64>> = Vec::with_capacity(self.n());
        let mut force = vec![0.0; k];
        for i in 0..self.n() {
            let agent = &self.agents[i];
            if !agent.is_regular() {
                new_v.push(agent.v.clone());
                continue;
            }
            force.iter_mut().for_each(|f| *f = 0.0);
            self.accumulate_social(i, &order, &mut force);
            let env = env_force(&self.params, &agent.x);
            let mut v = agent.v.clone();
            for c in 0..k {
                let xi: f64 = self.rng.sample(StandardNormal);
                v[c] += dt * (force[c] + eta * xi + env[c]);
            }
            clamp_norm(&mut v, self.params.v_max);
            new_v.push(v);
        }
        let bounds = match self.params.env {
            Environment::ReflectingBox { half_width } => Some(half_width),
            _ => None,
        };
        for (agent, v) in self.agents.iter_mut().zip(new_v) {
            agent.v = v;
            for c in 0..k {
                agent.x[c] += dt * agent.v[c];
                if let Some(l) = bounds {
                    reflect(&mut agent.x[c], &mut agent.v[c], l);
                }
            }
        }
        self.t += 1;
    }

    pub fn summary(&self) -> StateSummary {
        StateSummary {
            t: self.t,
            regular: self.regular_count(),
            injected: self.n() - self.regular_count(),
            feed_size: self.feed_set.len(),
            edges: self.graph.edge_count(),
        }
    }

    /// Applies `steps` steps, recording after each one.
    pub fn run<R: Recorder>(&mut self, steps: u64, recorder: &mut R) -> RunResult<R::Record> {
        let mut records = Vec::with_capacity(steps as usize);
        for _ in 0..steps {
            self.step();
            records.push(recorder.record(self));
        }
        RunResult { records, summary: self.summary() }
    }
}

fn reflect(x: &mut f64, v: &mut f64, l: f64) {
    if *x > l {
        *x = 2.0 * l - *x;
        *v = -*v;
    } else if *x < -l {
        *x = -2.0 * l - *x;
        *v = -*v;
    }
    *x = x.clamp(-l, l);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with(agents: &[(&[f64], &[f64], f64)], params: DynamicsParams) -> SwarmState {
        let n = agents.len();
        let agents: Vec<AgentState> = agents
            .iter()
            .enumerate()
            .map(|(id, (x, v, r))| AgentState {
                id,
                x: x.to_vec(),
                v: v.to_vec(),
                rigidity: *r,
                kind: AgentKind::Regular,
            })
            .collect();
        let mut graph = InfluenceGraph::empty(n, Topology::Complete);
        for i in 0..n {
            for j in i + 1..n {
                graph.set(i, j, 1.0);
            }
        }
        SwarmState {
            agents,
            graph,
            params,
            t: 0,
            rng: SimRng::seed_from_u64(0),
            feed_set: BTreeSet::new(),
            interventions: Vec::new(),
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(communication_kernel(0.0, 3.0), 1.0);
        assert_eq!(communication_kernel(123.0, 0.0), 1.0);
        let expected = 1.0 / libm::sqrt(2.0);
        assert!((communication_kernel(1.0, 0.5) - expected).abs() < 1e-15);
    }

    #[test]
    fn single_agent_has_no_edges() {
        let s = init_population(1, DynamicsParams::default(), Topology::Complete, 99).unwrap();
        assert_eq!(s.graph.edge_count(), 0);
        assert_eq!(s.effective_neighbors(0).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn init_rejects_empty_and_bad_probability() {
        assert_eq!(
            init_population(0, DynamicsParams::default(), Topology::Complete, 1).unwrap_err(),
            SimError::EmptyPopulation
        );
        assert_eq!(
            init_population(3, DynamicsParams::default(), Topology::RandomDensity { p: -0.1 }, 1).unwrap_err(),
            SimError::InvalidProbability(-0.1)
        );
    }

    #[test]
    fn init_respects_bounds() {
        let params = DynamicsParams { v_max: 0.5, ..Default::default() };
        let s = init_population(200, params, Topology::Complete, 3).unwrap();
        for a in &s.agents {
            assert!(a.x.iter().all(|c| c.abs() <= 10.0));
            assert!(norm(&a.v) <= 0.5 + 1e-12);
            assert!((0.0..=1.0).contains(&a.rigidity));
        }
        assert!(s.agents.iter().enumerate().all(|(i, a)| a.id == i));
    }

    #[test]
    fn neighbors_within_horizon() {
        let params = DynamicsParams { sih_radius: 2.0, ..Default::default() };
        let s = state_with(&[(&[0.0, 0.0, 0.0], &[0.0; 3], 0.5), (&[1.0, 0.0, 0.0], &[0.0; 3], 0.5)], params);
        assert_eq!(s.effective_neighbors(0).unwrap(), vec![1]);
        assert_eq!(s.effective_neighbors(1).unwrap(), vec![0]);
        assert_eq!(s.effective_neighbors(2).unwrap_err(), SimError::InvalidAgent(2));
    }

    #[test]
    fn zero_horizon_sees_nothing() {
        let params = DynamicsParams { sih_radius: 0.0, ..Default::default() };
        let s = init_population(10, params, Topology::Complete, 5).unwrap();
        for i in 0..10 {
            assert!(s.effective_neighbors(i).unwrap().is_empty());
            assert!(s.social_force(i).unwrap().iter().all(|c| *c == 0.0));
        }
    }

    #[test]
    fn feed_members_visible_everywhere() {
        let params = DynamicsParams { sih_radius: 0.0, ..Default::default() };
        let mut s = init_population(4, params, Topology::RandomDensity { p: 0.0 }, 5).unwrap();
        s.feed_set.insert(2);
        assert_eq!(s.effective_neighbors(0).unwrap(), vec![2]);
        assert!(s.effective_neighbors(2).unwrap().is_empty());
    }

    #[test]
    fn consensus_is_a_fixed_point() {
        let v = [0.3, -0.2, 0.1];
        let s = state_with(
            &[(&[0.0, 0.0, 0.0], &v, 0.7), (&[1.0, 2.0, 0.0], &v, 0.2), (&[5.0, 0.0, 1.0], &v, 0.9)],
            DynamicsParams::default(),
        );
        for i in 0..3 {
            assert_eq!(s.social_force(i).unwrap(), vec![0.0; 3]);
        }
    }

    #[test]
    fn attractor_force() {
        let params = DynamicsParams {
            k: 2,
            env: Environment::Attractor { goal: vec![3.0, 0.0], gain: 2.0 },
            ..Default::default()
        };
        assert_eq!(env_force(&params, &[0.0, 0.0]), vec![2.0, 0.0]);
        assert_eq!(env_force(&params, &[3.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(env_force(&DynamicsParams { k: 2, ..Default::default() }, &[1.0, 1.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn ballistic_without_forces() {
        let params = DynamicsParams { stiffness: 0.0, noise_eta: 0.0, ..Default::default() };
        let mut s = init_population(5, params, Topology::Complete, 11).unwrap();
        let before = s.agents.clone();
        s.step();
        for (a, b) in s.agents.iter().zip(&before) {
            assert_eq!(a.v, b.v);
            for c in 0..3 {
                assert_eq!(a.x[c], b.x[c] + 0.1 * b.v[c]);
            }
        }
        assert_eq!(s.t, 1);
    }

    #[test]
    fn reflecting_box_keeps_agents_inside() {
        let params = DynamicsParams {
            stiffness: 0.0,
            dt: 1.0,
            env: Environment::ReflectingBox { half_width: 2.0 },
            ..Default::default()
        };
        let mut s = state_with(&[(&[1.5, 0.0, 0.0], &[1.0, 0.0, 0.0], 0.5)], params);
        s.step();
        assert_eq!(s.agents[0].x[0], 1.5);
        assert_eq!(s.agents[0].v[0], -1.0);
    }

    #[test]
    fn speed_is_clamped() {
        let params = DynamicsParams { stiffness: 100.0, kernel_beta: 0.0, v_max: 1.0, ..Default::default() };
        let mut s = state_with(&[(&[0.0; 3], &[0.0; 3], 1.0), (&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0], 1.0)], params);
        s.step();
        assert!(s.agents.iter().all(|a| norm(&a.v) <= 1.0 + 1e-12));
    }

    struct Count(usize);
    impl Recorder for Count {
        type Record = usize;
        fn record(&mut self, _: &SwarmState) -> usize {
            self.0 += 1;
            self.0
        }
    }

    #[test]
    fn run_records_every_step() {
        let mut s = init_population(4, DynamicsParams::default(), Topology::Complete, 1).unwrap();
        let before = s.clone();
        let r = s.run(0, &mut Count(0));
        assert!(r.records.is_empty());
        assert_eq!(s, before);
        let r = s.run(7, &mut Count(0));
        assert_eq!(r.records, (1..=7).collect::<Vec<_>>());
        assert_eq!(r.summary.t, 7);
    }
}
