use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::network::{EdgeId, NodeId, RoadEdge, RoadNetwork};
use super::RouteError;

/// A path as visited nodes and traversed edges, with its total length.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Starts at the source. Holds only the source when source equals target.
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    f: f64,
    g: f64,
    node: NodeId,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // Reversed so that BinaryHeap pops the smallest f, then the smallest node id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest route over edges for which `passable` holds, guided by
/// straight-line distance to `dst`.
pub fn astar_route(
    net: &RoadNetwork,
    src: NodeId,
    dst: NodeId,
    passable: impl Fn(&RoadEdge) -> bool,
) -> Result<Route, RouteError> {
    net.node(src)?;
    net.node(dst)?;
    if src == dst {
        return Ok(Route { nodes: vec![src], edges: Vec::new(), cost: 0.0 });
    }
    let n = net.nodes().len();
    let mut best_g = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(NodeId, EdgeId)>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    best_g[src] = 0.0;
    open.push(Frontier { f: net.straight_distance(src, dst), g: 0.0, node: src });
    while let Some(Frontier { g, node, .. }) = open.pop() {
        if closed[node] || g > best_g[node] {
            continue;
        }
        if node == dst {
            return Ok(reconstruct(&parent, src, dst, g));
        }
        closed[node] = true;
        for &(e, next) in net.incident(node) {
            if closed[next] || !passable(net.edge(e)) {
                continue;
            }
            let g_next = g + net.edge(e).length;
            if g_next < best_g[next] {
                best_g[next] = g_next;
                parent[next] = Some((node, e));
                open.push(Frontier { f: g_next + net.straight_distance(next, dst), g: g_next, node: next });
            }
        }
    }
    Err(RouteError::NoRoute { src, dst })
}

fn reconstruct(parent: &[Option<(NodeId, EdgeId)>], src: NodeId, dst: NodeId, cost: f64) -> Route {
    let mut nodes = vec![dst];
    let mut edges = Vec::new();
    let mut at = dst;
    while at != src {
        let (prev, e) = parent[at].expect("parent chain reaches the source");
        nodes.push(prev);
        edges.push(e);
        at = prev;
    }
    nodes.reverse();
    edges.reverse();
    Route { nodes, edges, cost }
}

#[cfg(test)]
mod tests {
    use super::super::network::EdgeSpec;
    use super::*;

    fn diamond() -> RoadNetwork {
        // 0 -> 1 -> 3 is shorter than 0 -> 2 -> 3.
        let pts = [(0.0, 0.0), (1.0, 0.5), (1.0, -2.0), (2.0, 0.0)];
        let edges =
            [EdgeSpec::straight(0, 1), EdgeSpec::straight(1, 3), EdgeSpec::straight(0, 2), EdgeSpec::straight(2, 3)];
        RoadNetwork::new(&pts, &edges).unwrap()
    }

    #[test]
    fn same_node_is_empty_route() {
        let r = astar_route(&diamond(), 2, 2, |_| true).unwrap();
        assert_eq!((r.nodes, r.edges, r.cost), (vec![2], vec![], 0.0));
    }

    #[test]
    fn picks_shorter_branch_and_avoids_impassable() {
        let net = diamond();
        let r = astar_route(&net, 0, 3, |_| true).unwrap();
        assert_eq!(r.nodes, vec![0, 1, 3]);
        assert_eq!(r.edges, vec![0, 1]);
        let r = astar_route(&net, 0, 3, |e| e.id != 1).unwrap();
        assert_eq!(r.nodes, vec![0, 2, 3]);
        assert_eq!(astar_route(&net, 0, 3, |_| false).unwrap_err(), RouteError::NoRoute { src: 0, dst: 3 });
        assert_eq!(astar_route(&net, 0, 9, |_| true).unwrap_err(), RouteError::InvalidNode(9));
    }

    #[test]
    fn ties_prefer_smaller_node_id() {
        // Two mirror-image routes of identical length via node 1 or node 2.
        let pts = [(0.0, 0.0), (1.0, 1.0), (1.0, -1.0), (2.0, 0.0)];
        let edges =
            [EdgeSpec::straight(0, 2), EdgeSpec::straight(2, 3), EdgeSpec::straight(0, 1), EdgeSpec::straight(1, 3)];
        let net = RoadNetwork::new(&pts, &edges).unwrap();
        assert_eq!(astar_route(&net, 0, 3, |_| true).unwrap().nodes, vec![0, 1, 3]);
    }
}
