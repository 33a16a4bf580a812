//! Plain-text road network files.
//!
//! One record per line; blank lines and text after `#` are ignored.
//!
//! ```text
//! node <id> <x> <y>
//! edge <a> <b> <length|-> [closed]
//! ```
//!
//! Node ids must run 0, 1, 2, ... in file order. Coordinates and lengths are
//! in miles; `-` takes the straight-line distance. The optional `closed`
//! marks an official closure.

use std::fmt::Write;
use std::path::Path;

use stampede_core::route::{EdgeSpec, RoadNetwork, RouteError};

use crate::error::{LabError, Result};

pub fn read_network(path: &Path) -> Result<RoadNetwork> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_network(&text, path)
}

/// Parses network text; `origin` is only used in error messages.
pub fn parse_network(text: &str, origin: &Path) -> Result<RoadNetwork> {
    let fail = |line: usize, reason: String| LabError::Network { path: origin.to_path_buf(), line, reason };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        let num = |i: usize, what: &str| -> Result<f64> {
            let s = fields.get(i).ok_or_else(|| fail(line, format!("missing {what}")))?;
            s.parse::<f64>().map_err(|_| fail(line, format!("bad {what} `{s}`")))
        };
        let id = |i: usize, what: &str| -> Result<usize> {
            let s = fields.get(i).ok_or_else(|| fail(line, format!("missing {what}")))?;
            s.parse::<usize>().map_err(|_| fail(line, format!("bad {what} `{s}`")))
        };
        match fields.first().copied() {
            None => continue,
            Some("node") => {
                if fields.len() != 4 {
                    return Err(fail(line, "expected `node <id> <x> <y>`".into()));
                }
                let n = id(1, "node id")?;
                if n != nodes.len() {
                    return Err(fail(line, format!("node id {n} out of sequence, expected {}", nodes.len())));
                }
                nodes.push((num(2, "x")?, num(3, "y")?));
            }
            Some("edge") => {
                if !(4..=5).contains(&fields.len()) {
                    return Err(fail(line, "expected `edge <a> <b> <length|-> [closed]`".into()));
                }
                let length = if fields[3] == "-" { None } else { Some(num(3, "length")?) };
                let closed_official = match fields.get(4) {
                    None => false,
                    Some(&"closed") => true,
                    Some(other) => return Err(fail(line, format!("unknown edge flag `{other}`"))),
                };
                edges.push(EdgeSpec { a: id(1, "endpoint")?, b: id(2, "endpoint")?, length, closed_official });
                edge_lines.push(line);
            }
            Some(other) => return Err(fail(line, format!("unknown record `{other}`"))),
        }
    }
    // Whole-network problems carry line 0.
    RoadNetwork::new(&nodes, &edges).map_err(|e| {
        let line = match e {
            RouteError::ShortEdge { edge } => edge_lines[edge],
            _ => 0,
        };
        fail(line, e.to_string())
    })
}

/// Serialises a network; `parse_network` reads it back unchanged.
pub fn write_network(net: &RoadNetwork) -> String {
    let mut out = String::new();
    for n in net.nodes() {
        let _ = writeln!(out, "node {} {:?} {:?}", n.id, n.x, n.y);
    }
    for e in net.edges() {
        let flag = if e.closed_official { " closed" } else { "" };
        let _ = writeln!(out, "edge {} {} {:?}{flag}", e.a, e.b, e.length);
    }
    out
}
