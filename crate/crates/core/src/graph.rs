//! Symmetric weighted influence graph stored as a dense matrix.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::SimError;
use crate::vecmath::distance;

/// How the influence graph is generated at initialisation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Topology {
    Complete,
    /// Erdos-Renyi graph with edge probability `p`.
    RandomDensity {
        p: f64,
    },
    /// Connects agents whose initial belief positions are within `tau`.
    SimilarityThreshold {
        tau: f64,
    },
}

impl Topology {
    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            Topology::Complete => Ok(()),
            Topology::RandomDensity { p } if (0.0..=1.0).contains(&p) => Ok(()),
            Topology::RandomDensity { p } => Err(SimError::InvalidProbability(p)),
            Topology::SimilarityThreshold { tau } if tau >= 0.0 => Ok(()),
            Topology::SimilarityThreshold { .. } => Err(SimError::param("topology.tau", "must be >= 0")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InfluenceGraph {
    n: usize,
    weights: Vec<f64>,
    pub topology: Topology,
}

impl InfluenceGraph {
    pub fn empty(n: usize, topology: Topology) -> Self {
        InfluenceGraph { n, weights: vec![0.0; n * n], topology }
    }

    /// Builds the graph for `positions` according to `topology`. Only
    /// `RandomDensity` consumes randomness, one draw per unordered pair in
    /// lexicographic order.
    pub fn build<R: Rng>(topology: Topology, positions: &[&[f64]], rng: &mut R) -> Result<Self, SimError> {
        topology.validate()?;
        let n = positions.len();
        let mut g = InfluenceGraph::empty(n, topology);
        for i in 0..n {
            for j in i + 1..n {
                let connect = match topology {
                    Topology::Complete => true,
                    Topology::RandomDensity { p } => rng.random::<f64>() < p,
                    Topology::SimilarityThreshold { tau } => distance(positions[i], positions[j]) <= tau,
                };
                if connect {
                    g.set(i, j, 1.0);
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Sets `w_ij = w_ji = w`. Self-loops are ignored.
    pub fn set(&mut self, i: usize, j: usize, w: f64) {
        if i == j {
            return;
        }
        let w = w.max(0.0);
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
    }

    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.weight(i, j) > 0.0
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).filter(|&(i, j)| self.connected(i, j)).count()
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.connected(i, j)).count()
    }

    /// Appends `extra` isolated nodes.
    pub fn grow(&mut self, extra: usize) {
        let m = self.n + extra;
        let mut w = vec![0.0; m * m];
        for i in 0..self.n {
            w[i * m..i * m + self.n].copy_from_slice(&self.weights[i * self.n..(i + 1) * self.n]);
        }
        self.n = m;
        self.weights = w;
    }

    /// Keeps only the first `m` nodes.
    pub fn truncate(&mut self, m: usize) {
        if m >= self.n {
            return;
        }
        let mut w = vec![0.0; m * m];
        for i in 0..m {
            w[i * m..(i + 1) * m].copy_from_slice(&self.weights[i * self.n..i * self.n + m]);
        }
        self.n = m;
        self.weights = w;
    }

    /// Checks symmetry, zero diagonal and non-negative weights.
    pub fn is_well_formed(&self) -> bool {
        (0..self.n).all(|i| {
            self.weight(i, i) == 0.0
                && (0..self.n).all(|j| self.weight(i, j) >= 0.0 && self.weight(i, j) == self.weight(j, i))
        })
    }
}
