//! Order parameters and the nomadic / flocking / stampede classifier.
//!
//! All herd metrics are taken over regular agents only; injected agents are
//! excluded so interventions are judged by their effect on the original
//! population.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::SimError;
use crate::swarm::{Recorder, SwarmState};
use crate::vecmath::{angle_between, distance, mean, norm, unit};

/// Speeds at or below this are treated as zero.
pub const SPEED_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Phase {
    Nomadic,
    Flocking,
    Stampede,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Nomadic => "Nomadic",
            Phase::Flocking => "Flocking",
            Phase::Stampede => "Stampede",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct PhaseThresholds {
    pub phi_hi: f64,
    pub phi_lo: f64,
    pub density_hi: f64,
    /// Length of the trailing window over which polarization is averaged.
    pub window: usize,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        PhaseThresholds { phi_hi: 0.9, phi_lo: 0.3, density_hi: 0.5, window: 10 }
    }
}

impl PhaseThresholds {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0 <= self.phi_lo && self.phi_lo < self.phi_hi && self.phi_hi <= 1.0) {
            return Err(SimError::param("thresholds", "need 0 <= phi_lo < phi_hi <= 1"));
        }
        if !(0.0..=1.0).contains(&self.density_hi) {
            return Err(SimError::param("thresholds.density_hi", "must lie in [0, 1]"));
        }
        if self.window == 0 {
            return Err(SimError::param("thresholds.window", "must be at least 1"));
        }
        Ok(())
    }
}

/// Per-step metrics and classified phase.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseReport {
    pub t: u64,
    pub polarization: f64,
    pub velocity_diameter: f64,
    pub participation_ratio: f64,
    pub mean_degree_fraction: f64,
    pub phase: Phase,
    pub peeled_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization {
    pub value: f64,
    /// No agent had a nonzero velocity; `value` is 0 by convention.
    pub degenerate: bool,
}

/// Norm of the mean unit velocity over the nonzero velocities given.
pub fn polarization_of<'a>(velocities: impl Iterator<Item = &'a [f64]>) -> Polarization {
    let mut sum: Vec<f64> = Vec::new();
    let mut m = 0usize;
    for v in velocities {
        let s = norm(v);
        if s <= SPEED_EPS {
            continue;
        }
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        sum.iter_mut().zip(v).for_each(|(a, c)| *a += c / s);
        m += 1;
    }
    if m == 0 {
        return Polarization { value: 0.0, degenerate: true };
    }
    Polarization { value: (norm(&sum) / m as f64).min(1.0), degenerate: false }
}

pub fn polarization(state: &SwarmState) -> Polarization {
    polarization_of(state.regular().map(|a| a.v.as_slice()))
}

/// Largest pairwise velocity difference among regular agents.
pub fn velocity_diameter(state: &SwarmState) -> f64 {
    let vs: Vec<&[f64]> = state.regular().map(|a| a.v.as_slice()).collect();
    let mut best = 0.0f64;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            best = best.max(distance(vs[i], vs[j]));
        }
    }
    best
}

/// Effective dimensionality `(sum l)^2 / sum l^2` of the regular agents'
/// positional covariance, where `l` are its eigenvalues.
///
/// Both sums are spectral invariants (trace of `C` and of `C^2`), so no
/// eigendecomposition is needed.
pub fn participation_ratio(state: &SwarmState) -> Result<f64, SimError> {
    let xs: Vec<&[f64]> = state.regular().map(|a| a.x.as_slice()).collect();
    participation_ratio_of(&xs)
}

pub fn participation_ratio_of(xs: &[&[f64]]) -> Result<f64, SimError> {
    if xs.len() < 2 {
        return Err(SimError::TooFewAgents { needed: 2, found: xs.len() });
    }
    let k = xs[0].len();
    let n = xs.len() as f64;
    let mu = mean(k, xs.iter().copied());
    let mut cov = vec![0.0; k * k];
    for x in xs {
        for a in 0..k {
            let da = x[a] - mu[a];
            for b in a..k {
                cov[a * k + b] += da * (x[b] - mu[b]);
            }
        }
    }
    for a in 0..k {
        for b in a..k {
            cov[a * k + b] /= n;
            cov[b * k + a] = cov[a * k + b];
        }
    }
    let trace: f64 = (0..k).map(|a| cov[a * k + a]).sum();
    if trace < 1e-12 {
        return Ok(1.0);
    }
    let frob2: f64 = cov.iter().map(|c| c * c).sum();
    Ok((trace * trace / frob2).clamp(1.0, k as f64))
}

/// Mean number of regular agents each regular agent sees, over `n_regular - 1`.
pub fn mean_degree_fraction(state: &SwarmState) -> f64 {
    let ids: Vec<usize> = (0..state.n()).filter(|&i| state.agents[i].is_regular()).collect();
    if ids.len() < 2 {
        return 0.0;
    }
    let total: usize = ids
        .iter()
        .map(|&i| {
            state
                .effective_neighbors(i)
                .map(|ns| ns.into_iter().filter(|&j| state.agents[j].is_regular()).count())
                .unwrap_or(0)
        })
        .sum();
    total as f64 / (ids.len() * (ids.len() - 1)) as f64
}

/// Labels a (window-averaged) polarization and degree fraction.
pub fn classify_phase(phi: f64, density: f64, th: &PhaseThresholds) -> Phase {
    if phi >= th.phi_hi && density >= th.density_hi {
        Phase::Stampede
    } else if phi <= th.phi_lo {
        Phase::Nomadic
    } else {
        Phase::Flocking
    }
}

/// Applies [`classify_phase`] to the trailing-window mean of polarization.
#[derive(Debug, Clone)]
pub struct PhaseClassifier {
    thresholds: PhaseThresholds,
    window: VecDeque<f64>,
}

impl PhaseClassifier {
    pub fn new(thresholds: PhaseThresholds) -> Self {
        let cap = thresholds.window;
        PhaseClassifier { thresholds, window: VecDeque::with_capacity(cap) }
    }

    pub fn push(&mut self, phi: f64, density: f64) -> Phase {
        if self.window.len() == self.thresholds.window {
            self.window.pop_front();
        }
        self.window.push_back(phi);
        classify_phase(self.window_mean(), density, &self.thresholds)
    }

    pub fn window_mean(&self) -> f64 {
        if self.window.is_empty() {
            return 0.0;
        }
        self.window.iter().sum::<f64>() / self.window.len() as f64
    }

    pub fn is_full(&self) -> bool {
        self.window.len() == self.thresholds.window
    }
}

pub const DEFAULT_THETA_PEEL: f64 = core::f64::consts::PI / 3.0;
pub const DEFAULT_T_PEEL: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeelFlag {
    pub id: usize,
    pub rigidity: f64,
    pub peeled: bool,
}

/// Peel rates split at rigidity 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeelStats {
    pub peeled: usize,
    pub low_rigidity_rate: f64,
    pub high_rigidity_rate: f64,
    pub low_rigidity_n: usize,
    pub high_rigidity_n: usize,
}

/// Counts regular agents whose heading has stayed more than `theta` away
/// from a captured herd direction for at least `t_peel` consecutive steps.
///
/// The count is the current one: an agent that swings back inside the cone
/// stops being counted. Agents at rest do not extend their streak.
#[derive(Debug, Clone)]
pub struct PeelTracker {
    herd_direction: Vec<f64>,
    theta: f64,
    t_peel: u32,
    /// (id, rigidity, streak) for the regular agents present at capture.
    streaks: Vec<(usize, f64, u32)>,
}

impl PeelTracker {
    pub fn new(herd_direction: &[f64], theta: f64, t_peel: u32, agents: &[(usize, f64)]) -> Result<Self, SimError> {
        let herd_direction = unit(herd_direction).ok_or(SimError::ZeroHerdDirection)?;
        Ok(PeelTracker { herd_direction, theta, t_peel, streaks: agents.iter().map(|&(id, r)| (id, r, 0)).collect() })
    }

    /// Captures the mean regular velocity direction of `state`.
    pub fn capture(state: &SwarmState, theta: f64, t_peel: u32) -> Result<Self, SimError> {
        let dir = mean(state.params.k, state.regular().map(|a| a.v.as_slice()));
        let agents: Vec<(usize, f64)> = state.regular().map(|a| (a.id, a.rigidity)).collect();
        Self::new(&dir, theta, t_peel, &agents)
    }

    pub fn herd_direction(&self) -> &[f64] {
        &self.herd_direction
    }

    /// Updates streaks from a velocity lookup by agent id.
    pub fn observe_with<'a>(&mut self, velocity_of: impl Fn(usize) -> Option<&'a [f64]>) {
        for (id, _, streak) in &mut self.streaks {
            let away =
                velocity_of(*id).and_then(|v| angle_between(v, &self.herd_direction)).is_some_and(|a| a > self.theta);
            *streak = if away { streak.saturating_add(1) } else { 0 };
        }
    }

    pub fn observe(&mut self, state: &SwarmState) {
        self.observe_with(|id| state.agents.get(id).filter(|a| a.is_regular()).map(|a| a.v.as_slice()));
    }

    pub fn peeled_count(&self) -> usize {
        self.streaks.iter().filter(|s| s.2 >= self.t_peel).count()
    }

    pub fn flags(&self) -> Vec<PeelFlag> {
        self.streaks.iter().map(|&(id, rigidity, s)| PeelFlag { id, rigidity, peeled: s >= self.t_peel }).collect()
    }

    pub fn stats(&self) -> PeelStats {
        let flags = self.flags();
        let rate = |low: bool| {
            let group: Vec<&PeelFlag> = flags.iter().filter(|f| (f.rigidity < 0.5) == low).collect();
            let n = group.len();
            let r = if n == 0 { 0.0 } else { group.iter().filter(|f| f.peeled).count() as f64 / n as f64 };
            (r, n)
        };
        let (lr, ln) = rate(true);
        let (hr, hn) = rate(false);
        PeelStats {
            peeled: self.peeled_count(),
            low_rigidity_rate: lr,
            high_rigidity_rate: hr,
            low_rigidity_n: ln,
            high_rigidity_n: hn,
        }
    }
}

/// Instantaneous metrics without phase bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub polarization: f64,
    pub velocity_diameter: f64,
    pub participation_ratio: f64,
    pub mean_degree_fraction: f64,
}

pub fn snapshot(state: &SwarmState) -> Snapshot {
    Snapshot {
        polarization: polarization(state).value,
        velocity_diameter: velocity_diameter(state),
        participation_ratio: participation_ratio(state).unwrap_or(1.0),
        mean_degree_fraction: mean_degree_fraction(state),
    }
}

/// Recorder producing a [`PhaseReport`] per step.
#[derive(Debug, Clone)]
pub struct PhaseRecorder {
    classifier: PhaseClassifier,
    peel: Option<PeelTracker>,
}

impl PhaseRecorder {
    pub fn new(thresholds: PhaseThresholds) -> Self {
        PhaseRecorder { classifier: PhaseClassifier::new(thresholds), peel: None }
    }

    /// Starts peel tracking against the given tracker.
    pub fn arm_peel(&mut self, tracker: PeelTracker) {
        self.peel = Some(tracker);
    }

    pub fn peel(&self) -> Option<&PeelTracker> {
        self.peel.as_ref()
    }

    pub fn window_mean(&self) -> f64 {
        self.classifier.window_mean()
    }
}

impl Recorder for PhaseRecorder {
    type Record = PhaseReport;

    fn record(&mut self, state: &SwarmState) -> PhaseReport {
        let s = snapshot(state);
        let phase = self.classifier.push(s.polarization, s.mean_degree_fraction);
        let peeled_count = match &mut self.peel {
            Some(p) => {
                p.observe(state);
                p.peeled_count()
            }
            None => 0,
        };
        PhaseReport {
            t: state.t,
            polarization: s.polarization,
            velocity_diameter: s.velocity_diameter,
            participation_ratio: s.participation_ratio,
            mean_degree_fraction: s.mean_degree_fraction,
            phase,
            peeled_count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slices(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(|x| x.as_slice()).collect()
    }

    #[test]
    fn polarization_extremes() {
        let same = [vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]];
        assert!((polarization_of(slices(&same).into_iter()).value - 1.0).abs() < 1e-15);
        let opposite = [vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]];
        assert_eq!(polarization_of(slices(&opposite).into_iter()).value, 0.0);
        let zero = [vec![0.0, 0.0]];
        let p = polarization_of(slices(&zero).into_iter());
        assert!(p.degenerate && p.value == 0.0);
    }

    #[test]
    fn zero_velocities_are_skipped() {
        let vs = [vec![0.0, 0.0], vec![0.0, 3.0]];
        let p = polarization_of(slices(&vs).into_iter());
        assert!(!p.degenerate);
        assert_eq!(p.value, 1.0);
    }

    #[test]
    fn participation_ratio_conventions() {
        let line = [vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]];
        assert!((participation_ratio_of(&slices(&line)).unwrap() - 1.0).abs() < 1e-9);
        let square = [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert!((participation_ratio_of(&slices(&square)).unwrap() - 2.0).abs() < 1e-9);
        let point = [vec![2.0, 2.0], vec![2.0, 2.0]];
        assert_eq!(participation_ratio_of(&slices(&point)).unwrap(), 1.0);
        let one = [vec![2.0, 2.0]];
        assert!(matches!(participation_ratio_of(&slices(&one)), Err(SimError::TooFewAgents { .. })));
    }

    #[test]
    fn classification_table() {
        let th = PhaseThresholds::default();
        assert_eq!(classify_phase(1.0, 1.0, &th), Phase::Stampede);
        assert_eq!(classify_phase(0.0, 1.0, &th), Phase::Nomadic);
        assert_eq!(classify_phase(0.6, 0.2, &th), Phase::Flocking);
        assert_eq!(classify_phase(0.95, 0.2, &th), Phase::Flocking);
        assert_eq!(classify_phase(0.3, 0.9, &th), Phase::Nomadic);
    }

    #[test]
    fn thresholds_validation() {
        PhaseThresholds::default().validate().unwrap();
        assert!(PhaseThresholds { phi_lo: 0.9, phi_hi: 0.3, ..Default::default() }.validate().is_err());
        assert!(PhaseThresholds { window: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn classifier_smooths_flicker() {
        let th = PhaseThresholds { window: 4, ..Default::default() };
        let mut c = PhaseClassifier::new(th);
        for _ in 0..4 {
            assert_eq!(c.push(1.0, 1.0), Phase::Stampede);
        }
        // A single dip is averaged out: (1+1+1+0.7)/4 = 0.925.
        assert_eq!(c.push(0.7, 1.0), Phase::Stampede);
        assert!(c.is_full());
    }

    #[test]
    fn peel_tracker_counts_streaks() {
        let dir = [1.0, 0.0];
        let mut p = PeelTracker::new(&dir, DEFAULT_THETA_PEEL, 3, &[(0, 0.2), (1, 0.8)]).unwrap();
        let fwd = [1.0, 0.0];
        let back = [-1.0, 0.0];
        for step in 0..5 {
            p.observe_with(|id| Some(if id == 0 { &back[..] } else { &fwd[..] }));
            assert_eq!(p.peeled_count(), usize::from(step >= 2));
        }
        let s = p.stats();
        assert_eq!((s.low_rigidity_rate, s.high_rigidity_rate), (1.0, 0.0));
        // Swinging back resets the streak.
        p.observe_with(|_| Some(&fwd[..]));
        assert_eq!(p.peeled_count(), 0);
    }

    #[test]
    fn zero_herd_direction_rejected() {
        assert_eq!(PeelTracker::new(&[0.0, 0.0], 1.0, 1, &[]).unwrap_err(), SimError::ZeroHerdDirection);
    }
}
