//! Interventions on a running population: diversity injection and
//! adversarial densification of like-minded links.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::agent::{AgentKind, AgentState};
use crate::error::SimError;
use crate::graph::InfluenceGraph;
use crate::swarm::{InterventionEntry, InterventionKind, SimRng, SwarmState};
use crate::vecmath::{clamp_norm, distance, mean, unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum InjectionStrategy {
    /// Injected agents join the feed set and are seen by everyone.
    Feed,
    /// Injected agents are placed opposite the herd and seen only within the horizon.
    Spatial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum VelocityMode {
    /// Unit speed against the herd's mean heading.
    Antipodal,
    RandomUnit,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(deny_unknown_fields))]
pub struct InjectionSpec {
    pub m: usize,
    pub strategy: InjectionStrategy,
    pub t_inject: u64,
    #[cfg_attr(feature = "serde", serde(default = "default_spread"))]
    pub placement_spread: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_velocity_mode"))]
    pub velocity_mode: VelocityMode,
}

#[cfg(feature = "serde")]
fn default_spread() -> f64 {
    1.0
}

#[cfg(feature = "serde")]
fn default_velocity_mode() -> VelocityMode {
    VelocityMode::Antipodal
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(deny_unknown_fields))]
pub struct DensificationSpec {
    pub similarity_tau: f64,
    pub added_edges: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub push_gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensifyOutcome {
    pub added: usize,
    /// Fewer eligible pairs existed than were requested.
    pub shortfall: bool,
}

fn herd_centroid_and_heading(state: &SwarmState) -> (Vec<f64>, Vec<f64>) {
    let k = state.params.k;
    let c = mean(k, state.regular().map(|a| a.x.as_slice()));
    let u = mean(k, state.regular().map(|a| a.v.as_slice()));
    (c, u)
}

fn random_unit(rng: &mut SimRng, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = unit(&v) {
            return u;
        }
    }
}

fn random_in_ball(rng: &mut SimRng, center: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let offset: Vec<f64> = center.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
        if offset.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return center.iter().zip(offset).map(|(c, o)| c + radius * o).collect();
        }
    }
}

/// Appends `spec.m` injected beacon agents at step `spec.t_inject`.
///
/// Regular agents are not modified. Feed injections sit at the herd centroid
/// and enter the feed set; spatial injections sit in a ball around the
/// centroid mirrored through the origin and are linked to every regular
/// agent, so only the horizon decides who sees them.
pub fn inject_diversity(state: &mut SwarmState, spec: &InjectionSpec) -> Result<(), SimError> {
    if state.t != spec.t_inject {
        return Err(SimError::InjectionStepMismatch { expected: spec.t_inject, actual: state.t });
    }
    if state.interventions.iter().any(|e| e.kind == InterventionKind::Injection && e.t == state.t) {
        return Err(SimError::DuplicateInjection(state.t));
    }
    if spec.m > 0 && !(spec.placement_spread > 0.0) {
        return Err(SimError::param("injection.placement_spread", "must be > 0"));
    }
    let entry = InterventionEntry { t: state.t, kind: InterventionKind::Injection, count: spec.m };
    if spec.m == 0 {
        state.interventions.push(entry);
        return Ok(());
    }
    let k = state.params.k;
    let (centroid, heading) = herd_centroid_and_heading(state);
    let antipode = match spec.velocity_mode {
        VelocityMode::Antipodal => {
            let d = unit(&heading).ok_or(SimError::ZeroHerdDirection)?;
            Some(d.into_iter().map(|c| -c).collect::<Vec<f64>>())
        }
        VelocityMode::RandomUnit => None,
    };
    let mirrored: Vec<f64> = centroid.iter().map(|c| -c).collect();
    let first = state.n();
    let regular: Vec<usize> = (0..first).filter(|&i| state.agents[i].is_regular()).collect();
    state.graph.grow(spec.m);
    for id in first..first + spec.m {
        let x = match spec.strategy {
            InjectionStrategy::Feed => centroid.clone(),
            InjectionStrategy::Spatial => random_in_ball(&mut state.rng, &mirrored, spec.placement_spread),
        };
        let v = match &antipode {
            Some(a) => a.clone(),
            None => random_unit(&mut state.rng, k),
        };
        state.agents.push(AgentState { id, x, v, rigidity: 0.0, kind: AgentKind::Injected });
        match spec.strategy {
            InjectionStrategy::Feed => {
                state.feed_set.insert(id);
            }
            InjectionStrategy::Spatial => {
                for &r in &regular {
                    state.graph.set(id, r, 1.0);
                }
            }
        }
    }
    state.interventions.push(entry);
    Ok(())
}

/// Links the closest unconnected regular pairs within `similarity_tau`
/// (ties broken by id pair), then pushes the linked agents further along
/// their current heading.
pub fn densify_likeminded(state: &mut SwarmState, spec: &DensificationSpec) -> Result<DensifyOutcome, SimError> {
    if !(spec.similarity_tau >= 0.0) {
        return Err(SimError::param("densification.similarity_tau", "must be >= 0"));
    }
    if !(spec.push_gain >= 0.0) {
        return Err(SimError::param("densification.push_gain", "must be >= 0"));
    }
    let regular: Vec<usize> = (0..state.n()).filter(|&i| state.agents[i].is_regular()).collect();
    let mut eligible: Vec<(f64, usize, usize)> = Vec::new();
    for (a, &i) in regular.iter().enumerate() {
        for &j in &regular[a + 1..] {
            if state.graph.connected(i, j) {
                continue;
            }
            let d = distance(&state.agents[i].x, &state.agents[j].x);
            if d <= spec.similarity_tau {
                eligible.push((d, i, j));
            }
        }
    }
    eligible.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let added = spec.added_edges.min(eligible.len());
    let mut touched = alloc::vec![false; state.n()];
    for &(_, i, j) in &eligible[..added] {
        state.graph.set(i, j, 1.0);
        touched[i] = true;
        touched[j] = true;
    }
    if spec.push_gain > 0.0 {
        let v_max = state.params.v_max;
        for (agent, _) in state.agents.iter_mut().zip(&touched).filter(|(_, t)| **t) {
            if let Some(u) = unit(&agent.v) {
                agent.v.iter_mut().zip(u).for_each(|(c, d)| *c += spec.push_gain * d);
                clamp_norm(&mut agent.v, v_max);
            }
        }
    }
    if added > 0 || spec.push_gain > 0.0 {
        state.interventions.push(InterventionEntry { t: state.t, kind: InterventionKind::Densification, count: added });
    }
    Ok(DensifyOutcome { added, shortfall: added < spec.added_edges })
}

/// Drops every injected agent and clears the feed. A clean state is left untouched.
pub fn remove_injection(state: &mut SwarmState) {
    let keep: Vec<usize> = (0..state.n()).filter(|&i| state.agents[i].is_regular()).collect();
    if keep.len() == state.n() && state.feed_set.is_empty() {
        return;
    }
    let removed = state.n() - keep.len();
    let mut graph = InfluenceGraph::empty(keep.len(), state.graph.topology);
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate().skip(a + 1) {
            graph.set(a, b, state.graph.weight(i, j));
        }
    }
    let agents: Vec<AgentState> =
        keep.iter().enumerate().map(|(new_id, &i)| AgentState { id: new_id, ..state.agents[i].clone() }).collect();
    state.agents = agents;
    state.graph = graph;
    state.feed_set.clear();
    state.interventions.push(InterventionEntry { t: state.t, kind: InterventionKind::RemoveInjection, count: removed });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Topology;
    use crate::params::DynamicsParams;
    use crate::swarm::init_population;
    use alloc::vec;

    fn feed(m: usize, t: u64) -> InjectionSpec {
        InjectionSpec {
            m,
            strategy: InjectionStrategy::Feed,
            t_inject: t,
            placement_spread: 1.0,
            velocity_mode: VelocityMode::Antipodal,
        }
    }

    #[test]
    fn zero_injection_only_logs() {
        let mut s = init_population(6, DynamicsParams::default(), Topology::Complete, 2).unwrap();
        let before = s.clone();
        inject_diversity(&mut s, &feed(0, 0)).unwrap();
        assert_eq!(s.agents, before.agents);
        assert_eq!(s.rng, before.rng);
        assert_eq!(s.interventions.len(), 1);
        assert_eq!(s.interventions[0].count, 0);
    }

    #[test]
    fn feed_injection_is_visible_to_all() {
        let params = DynamicsParams { sih_radius: 0.0, ..Default::default() };
        let mut s = init_population(5, params, Topology::RandomDensity { p: 0.0 }, 2).unwrap();
        inject_diversity(&mut s, &feed(3, 0)).unwrap();
        assert_eq!(s.feed_set.iter().copied().collect::<Vec<_>>(), vec![5, 6, 7]);
        s.step();
        for i in 0..5 {
            assert_eq!(s.effective_neighbors(i).unwrap(), vec![5, 6, 7]);
        }
    }

    #[test]
    fn injection_step_and_duplicates_checked() {
        let mut s = init_population(5, DynamicsParams::default(), Topology::Complete, 2).unwrap();
        assert!(matches!(
            inject_diversity(&mut s, &feed(1, 3)),
            Err(SimError::InjectionStepMismatch { expected: 3, actual: 0 })
        ));
        inject_diversity(&mut s, &feed(1, 0)).unwrap();
        assert_eq!(inject_diversity(&mut s, &feed(1, 0)).unwrap_err(), SimError::DuplicateInjection(0));
    }

    #[test]
    fn antipodal_beacons_oppose_herd() {
        let mut s = init_population(20, DynamicsParams::default(), Topology::Complete, 4).unwrap();
        let (c, u) = herd_centroid_and_heading(&s);
        inject_diversity(&mut s, &feed(2, 0)).unwrap();
        let d = unit(&u).unwrap();
        for a in &s.agents[20..] {
            assert_eq!(a.kind, AgentKind::Injected);
            assert_eq!(a.x, c);
            for (vc, dc) in a.v.iter().zip(&d) {
                assert!((vc + dc).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn spatial_injection_mirrors_centroid() {
        let mut s = init_population(20, DynamicsParams::default(), Topology::Complete, 4).unwrap();
        let (c, _) = herd_centroid_and_heading(&s);
        let spec = InjectionSpec {
            strategy: InjectionStrategy::Spatial,
            placement_spread: 0.5,
            velocity_mode: VelocityMode::RandomUnit,
            ..feed(4, 0)
        };
        inject_diversity(&mut s, &spec).unwrap();
        assert!(s.feed_set.is_empty());
        let mirrored: Vec<f64> = c.iter().map(|x| -x).collect();
        for a in &s.agents[20..] {
            assert!(distance(&a.x, &mirrored) <= 0.5 + 1e-12);
            assert!((crate::vecmath::norm(&a.v) - 1.0).abs() < 1e-12);
            assert!((0..20).all(|r| s.graph.connected(a.id, r)));
        }
        assert!(s.graph.is_well_formed());
    }

    #[test]
    fn densify_completes_collinear_triple() {
        let params = DynamicsParams { k: 1, ..Default::default() };
        let mut s = init_population(3, params, Topology::RandomDensity { p: 0.0 }, 1).unwrap();
        for (a, x) in s.agents.iter_mut().zip([0.0, 1.0, 2.0]) {
            a.x = alloc::vec![x];
        }
        let out =
            densify_likeminded(&mut s, &DensificationSpec { similarity_tau: 5.0, added_edges: 3, push_gain: 0.0 })
                .unwrap();
        assert_eq!(out, DensifyOutcome { added: 3, shortfall: false });
        assert_eq!(s.graph.edge_count(), 3);
    }

    #[test]
    fn densify_prefers_closest_pairs_and_flags_shortfall() {
        let params = DynamicsParams { k: 1, ..Default::default() };
        let mut s = init_population(4, params, Topology::RandomDensity { p: 0.0 }, 1).unwrap();
        for (a, x) in s.agents.iter_mut().zip([0.0, 0.5, 3.0, 3.1]) {
            a.x = alloc::vec![x];
        }
        let spec = DensificationSpec { similarity_tau: 0.6, added_edges: 1, push_gain: 0.0 };
        densify_likeminded(&mut s, &spec).unwrap();
        assert!(s.graph.connected(2, 3));
        assert!(!s.graph.connected(0, 1));
        let out = densify_likeminded(&mut s, &DensificationSpec { added_edges: 5, ..spec }).unwrap();
        assert_eq!(out, DensifyOutcome { added: 1, shortfall: true });
        assert!(s.graph.is_well_formed());
    }

    #[test]
    fn densify_identity() {
        let mut s = init_population(8, DynamicsParams::default(), Topology::RandomDensity { p: 0.3 }, 9).unwrap();
        let before = s.clone();
        densify_likeminded(&mut s, &DensificationSpec { similarity_tau: 100.0, added_edges: 0, push_gain: 0.0 })
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn push_follows_heading() {
        let params = DynamicsParams { k: 2, ..Default::default() };
        let mut s = init_population(2, params, Topology::RandomDensity { p: 0.0 }, 1).unwrap();
        s.agents[0].x = alloc::vec![0.0, 0.0];
        s.agents[1].x = alloc::vec![0.1, 0.0];
        s.agents[0].v = alloc::vec![0.0, 1.0];
        s.agents[1].v = alloc::vec![0.0, 0.0];
        densify_likeminded(&mut s, &DensificationSpec { similarity_tau: 1.0, added_edges: 1, push_gain: 0.5 }).unwrap();
        assert_eq!(s.agents[0].v, alloc::vec![0.0, 1.5]);
        assert_eq!(s.agents[1].v, alloc::vec![0.0, 0.0]);
    }

    #[test]
    fn remove_restores_membership() {
        let mut s = init_population(6, DynamicsParams::default(), Topology::RandomDensity { p: 0.5 }, 3).unwrap();
        let before = s.clone();
        remove_injection(&mut s);
        assert_eq!(s, before);
        inject_diversity(&mut s, &feed(3, 0)).unwrap();
        remove_injection(&mut s);
        assert_eq!(s.agents, before.agents);
        assert_eq!(s.graph, before.graph);
        assert!(s.feed_set.is_empty());
    }
}
