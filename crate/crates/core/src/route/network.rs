use alloc::vec;
use alloc::vec::Vec;

use super::RouteError;

pub type NodeId = usize;
pub type EdgeId = usize;

/// A road junction with planar coordinates in miles.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoadNode {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

/// Undirected road segment with its hazard and closure state.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoadEdge {
    pub id: EdgeId,
    pub a: NodeId,
    pub b: NodeId,
    /// Miles.
    pub length: f64,
    pub closed_official: bool,
    pub closed_broadcast: bool,
    pub ignited: bool,
    pub blocked: bool,
    pub wreck_count: u32,
}

impl RoadEdge {
    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Input description of an edge. A missing length means straight-line distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub length: Option<f64>,
    pub closed_official: bool,
}

impl EdgeSpec {
    pub fn straight(a: NodeId, b: NodeId) -> Self {
        EdgeSpec { a, b, length: None, closed_official: false }
    }
}

/// Road graph. Closure, ignition and blocking flags can only be set, never
/// cleared, through this type's methods.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    nodes: Vec<RoadNode>,
    edges: Vec<RoadEdge>,
    adjacency: Vec<Vec<(EdgeId, NodeId)>>,
}

impl RoadNetwork {
    /// Builds a network; node ids are the indices of `coords`.
    ///
    /// Every edge must be at least as long as the straight line between its
    /// endpoints so that Euclidean distance stays an admissible A* heuristic,
    /// and the graph must be connected.
    pub fn new(coords: &[(f64, f64)], edges: &[EdgeSpec]) -> Result<Self, RouteError> {
        if coords.is_empty() {
            return Err(RouteError::InvalidNetwork("no nodes"));
        }
        if coords.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(RouteError::InvalidNetwork("non-finite node coordinate"));
        }
        let nodes: Vec<RoadNode> = coords.iter().enumerate().map(|(id, &(x, y))| RoadNode { id, x, y }).collect();
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut built = Vec::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            if e.a >= nodes.len() {
                return Err(RouteError::InvalidNode(e.a));
            }
            if e.b >= nodes.len() {
                return Err(RouteError::InvalidNode(e.b));
            }
            if e.a == e.b {
                return Err(RouteError::InvalidNetwork("self-loop edge"));
            }
            let straight = node_distance(&nodes[e.a], &nodes[e.b]);
            let length = e.length.unwrap_or(straight);
            if !(length > 0.0 && length.is_finite()) {
                return Err(RouteError::InvalidNetwork("edge length must be positive"));
            }
            if length < straight * (1.0 - 1e-12) {
                return Err(RouteError::ShortEdge { edge: id });
            }
            adjacency[e.a].push((id, e.b));
            adjacency[e.b].push((id, e.a));
            built.push(RoadEdge {
                id,
                a: e.a,
                b: e.b,
                length,
                closed_official: e.closed_official,
                closed_broadcast: false,
                ignited: false,
                blocked: false,
                wreck_count: 0,
            });
        }
        let net = RoadNetwork { nodes, edges: built, adjacency };
        if !net.is_connected() {
            return Err(RouteError::Disconnected);
        }
        Ok(net)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for &(_, m) in &self.adjacency[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn nodes(&self) -> &[RoadNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn node(&self, n: NodeId) -> Result<&RoadNode, RouteError> {
        self.nodes.get(n).ok_or(RouteError::InvalidNode(n))
    }

    pub fn edge(&self, e: EdgeId) -> &RoadEdge {
        &self.edges[e]
    }

    /// `(edge, neighbour)` pairs incident to `n`, in edge-id order.
    pub fn incident(&self, n: NodeId) -> &[(EdgeId, NodeId)] {
        &self.adjacency[n]
    }

    pub fn straight_distance(&self, a: NodeId, b: NodeId) -> f64 {
        node_distance(&self.nodes[a], &self.nodes[b])
    }

    pub fn midpoint(&self, e: EdgeId) -> (f64, f64) {
        let edge = &self.edges[e];
        let (a, b) = (&self.nodes[edge.a], &self.nodes[edge.b]);
        (0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
    }

    pub fn ignite(&mut self, e: EdgeId) {
        self.edges[e].ignited = true;
    }

    pub fn block(&mut self, e: EdgeId) {
        self.edges[e].blocked = true;
    }

    pub fn close_official(&mut self, e: EdgeId) {
        self.edges[e].closed_official = true;
    }

    pub fn close_broadcast(&mut self, e: EdgeId) {
        self.edges[e].closed_broadcast = true;
    }

    pub fn add_wreck(&mut self, e: EdgeId) {
        self.edges[e].wreck_count += 1;
    }
}

fn node_distance(a: &RoadNode, b: &RoadNode) -> f64 {
    libm::hypot(a.x - b.x, a.y - b.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_networks() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (5.0, 5.0)];
        assert_eq!(RoadNetwork::new(&pts, &[EdgeSpec::straight(0, 1)]).unwrap_err(), RouteError::Disconnected);
        assert_eq!(RoadNetwork::new(&pts, &[EdgeSpec::straight(0, 3)]).unwrap_err(), RouteError::InvalidNode(3));
        let short = EdgeSpec { length: Some(0.5), ..EdgeSpec::straight(0, 1) };
        assert_eq!(RoadNetwork::new(&pts[..2], &[short]).unwrap_err(), RouteError::ShortEdge { edge: 0 });
        assert!(RoadNetwork::new(&pts[..2], &[EdgeSpec::straight(1, 1)]).is_err());
    }

    #[test]
    fn default_length_is_straight_line() {
        let net = RoadNetwork::new(&[(0.0, 0.0), (3.0, 4.0)], &[EdgeSpec::straight(0, 1)]).unwrap();
        assert_eq!(net.edge(0).length, 5.0);
        assert_eq!(net.midpoint(0), (1.5, 2.0));
        assert_eq!(net.incident(1), &[(0, 0)]);
        assert_eq!(net.edge(0).other(1), 0);
    }
}
