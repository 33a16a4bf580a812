use stampede_core::interventions::*;
use stampede_core::swarm::init_population;
use stampede_core::*;

fn herd(n: usize, seed: u64) -> SwarmState {
    init_population(n, DynamicsParams::default(), Topology::Complete, seed).unwrap()
}

fn spec(m: usize, strategy: InjectionStrategy, mode: VelocityMode) -> InjectionSpec {
    InjectionSpec { m, strategy, t_inject: 0, placement_spread: 1.5, velocity_mode: mode }
}

fn mean_of(vs: impl Iterator<Item = Vec<f64>>, k: usize) -> Vec<f64> {
    let all: Vec<Vec<f64>> = vs.collect();
    (0..k).map(|c| all.iter().map(|v| v[c]).sum::<f64>() / all.len() as f64).collect()
}

#[test]
fn feed_items_are_visible_to_everyone() {
    let p = DynamicsParams { sih_radius: 0.5, ..Default::default() };
    let mut s = init_population(12, p, Topology::RandomDensity { p: 0.2 }, 3).unwrap();
    inject_diversity(&mut s, &spec(3, InjectionStrategy::Feed, VelocityMode::Antipodal)).unwrap();
    assert_eq!(s.feed_set.iter().copied().collect::<Vec<_>>(), vec![12, 13, 14]);
    s.step();
    for i in 0..12 {
        let nb = s.effective_neighbors(i).unwrap();
        assert!([12, 13, 14].iter().all(|id| nb.contains(id)), "agent {i}");
    }
}

#[test]
fn feed_placement_and_antipodal_velocity() {
    let mut s = herd(20, 5);
    let centroid = mean_of(s.agents.iter().map(|a| a.x.clone()), 3);
    let heading = mean_of(s.agents.iter().map(|a| a.v.clone()), 3);
    let speed = heading.iter().map(|c| c * c).sum::<f64>().sqrt();
    inject_diversity(&mut s, &spec(4, InjectionStrategy::Feed, VelocityMode::Antipodal)).unwrap();
    for a in &s.agents[20..] {
        assert_eq!(a.kind, AgentKind::Injected);
        for c in 0..3 {
            assert!((a.x[c] - centroid[c]).abs() < 1e-12);
            assert!((a.v[c] + heading[c] / speed).abs() < 1e-12);
        }
    }
}

#[test]
fn spatial_placement_mirrors_centroid() {
    let mut s = herd(20, 6);
    let centroid = mean_of(s.agents.iter().map(|a| a.x.clone()), 3);
    inject_diversity(&mut s, &spec(8, InjectionStrategy::Spatial, VelocityMode::RandomUnit)).unwrap();
    assert!(s.feed_set.is_empty());
    for a in &s.agents[20..] {
        let d: f64 = (0..3).map(|c| (a.x[c] + centroid[c]).powi(2)).sum::<f64>().sqrt();
        assert!(d <= 1.5 + 1e-12);
        let speed: f64 = a.v.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((speed - 1.0).abs() < 1e-12);
    }
    assert!(s.graph.is_well_formed());
    assert_eq!(s.graph.n(), 28);
}

#[test]
fn injected_agents_keep_their_velocity() {
    let mut s = herd(10, 1);
    inject_diversity(&mut s, &spec(2, InjectionStrategy::Spatial, VelocityMode::RandomUnit)).unwrap();
    let before: Vec<Vec<f64>> = s.agents[10..].iter().map(|a| a.v.clone()).collect();
    for _ in 0..20 {
        s.step();
    }
    let after: Vec<Vec<f64>> = s.agents[10..].iter().map(|a| a.v.clone()).collect();
    assert_eq!(before, after);
}

#[test]
fn injection_errors() {
    let mut s = herd(5, 2);
    let wrong_step = InjectionSpec { t_inject: 4, ..spec(1, InjectionStrategy::Feed, VelocityMode::Antipodal) };
    assert_eq!(
        inject_diversity(&mut s, &wrong_step).unwrap_err(),
        SimError::InjectionStepMismatch { expected: 4, actual: 0 }
    );
    inject_diversity(&mut s, &spec(1, InjectionStrategy::Feed, VelocityMode::Antipodal)).unwrap();
    assert_eq!(
        inject_diversity(&mut s, &spec(1, InjectionStrategy::Feed, VelocityMode::Antipodal)).unwrap_err(),
        SimError::DuplicateInjection(0)
    );
    let mut still = herd(5, 2);
    still.agents.iter_mut().for_each(|a| a.v = vec![0.0; 3]);
    assert_eq!(
        inject_diversity(&mut still, &spec(1, InjectionStrategy::Feed, VelocityMode::Antipodal)).unwrap_err(),
        SimError::ZeroHerdDirection
    );
}

#[test]
fn zero_injection_changes_nothing_but_the_log() {
    let mut a = herd(15, 8);
    let mut b = a.clone();
    inject_diversity(&mut a, &spec(0, InjectionStrategy::Feed, VelocityMode::RandomUnit)).unwrap();
    assert_eq!(a.interventions.len(), 1);
    for _ in 0..30 {
        a.step();
        b.step();
    }
    assert_eq!(a.agents, b.agents);
}

#[test]
fn densify_adds_closest_pairs_symmetrically() {
    let mut s = init_population(20, DynamicsParams::default(), Topology::RandomDensity { p: 0.1 }, 4).unwrap();
    let before = s.graph.clone();
    let out = densify_likeminded(&mut s, &DensificationSpec { similarity_tau: 12.0, added_edges: 15, push_gain: 0.0 })
        .unwrap();
    assert_eq!(out.added, 15);
    assert!(!out.shortfall);
    assert!(s.graph.is_well_formed());
    assert_eq!(s.graph.edge_count(), before.edge_count() + 15);
    // Every added pair is at least as close as every eligible pair left out.
    let dist = |i: usize, j: usize| -> f64 {
        (0..3).map(|c| (s.agents[i].x[c] - s.agents[j].x[c]).powi(2)).sum::<f64>().sqrt()
    };
    let mut added_max: f64 = 0.0;
    let mut left_min = f64::INFINITY;
    for i in 0..20 {
        for j in i + 1..20 {
            if before.connected(i, j) {
                continue;
            }
            if s.graph.connected(i, j) {
                added_max = added_max.max(dist(i, j));
            } else if dist(i, j) <= 12.0 {
                left_min = left_min.min(dist(i, j));
            }
        }
    }
    assert!(added_max <= left_min);
}

#[test]
fn densify_reports_shortfall_and_push() {
    let mut s = herd(6, 1);
    let out = densify_likeminded(&mut s, &DensificationSpec { similarity_tau: 100.0, added_edges: 3, push_gain: 0.0 })
        .unwrap();
    assert_eq!(out, DensifyOutcome { added: 0, shortfall: true });

    let mut s = init_population(6, DynamicsParams::default(), Topology::RandomDensity { p: 0.0 }, 1).unwrap();
    let speeds: Vec<f64> = s.agents.iter().map(|a| a.v.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
    densify_likeminded(&mut s, &DensificationSpec { similarity_tau: 100.0, added_edges: 1, push_gain: 0.5 }).unwrap();
    let touched: Vec<usize> = (0..6).filter(|&i| s.graph.degree(i) > 0).collect();
    assert_eq!(touched.len(), 2);
    for (i, a) in s.agents.iter().enumerate() {
        let speed = a.v.iter().map(|c| c * c).sum::<f64>().sqrt();
        let expected = if touched.contains(&i) { speeds[i] + 0.5 } else { speeds[i] };
        assert!((speed - expected).abs() < 1e-12);
    }
    assert!(densify_likeminded(&mut s, &DensificationSpec { similarity_tau: -1.0, added_edges: 1, push_gain: 0.0 })
        .is_err());
}

#[test]
fn remove_injection_restores_regular_population() {
    let mut s = herd(10, 9);
    let clean = s.clone();
    remove_injection(&mut s);
    assert_eq!(s, clean);
    inject_diversity(&mut s, &spec(3, InjectionStrategy::Spatial, VelocityMode::Antipodal)).unwrap();
    remove_injection(&mut s);
    assert_eq!(s.agents, clean.agents);
    assert_eq!(s.graph, clean.graph);
    assert!(s.feed_set.is_empty());
}
