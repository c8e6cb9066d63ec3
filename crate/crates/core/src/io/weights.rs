//! Rules turning node roles or contact multiplicities into edge distances.

use std::collections::HashMap;
use std::io::BufRead;
use std::str::FromStr;

use crate::graph::{EdgeWeights, Graph};

use super::edge_list::LabeledNetwork;
use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Hijacker,
    Facilitator,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hijacker" | "h" => Ok(Role::Hijacker),
            "facilitator" | "f" => Ok(Role::Facilitator),
            other => Err(format!("unknown role '{other}'")),
        }
    }
}

/// Parse `label role` lines (`#` comments allowed).
pub fn parse_roles<R: BufRead>(reader: R) -> Result<HashMap<String, Role>, IoError> {
    let mut roles = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| IoError::Io(e.to_string()))?;
        let tokens: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [label, role] => {
                let role = role.parse().map_err(|message| IoError::Syntax { line: i + 1, message })?;
                roles.insert(label.to_string(), role);
            }
            _ => {
                return Err(IoError::Syntax { line: i + 1, message: "expected 'label role'".into() });
            }
        }
    }
    Ok(roles)
}

/// Distance 2, 1 or 0.5 for edges with zero, one or two hijacker endpoints.
pub fn map_hijacker_weights(net: &LabeledNetwork, roles: &HashMap<String, Role>) -> Result<EdgeWeights<f64>, IoError> {
    let role_of = |node: usize| -> Result<Role, IoError> {
        let label = &net.labels[node];
        roles.get(label).copied().ok_or_else(|| IoError::MissingRole { label: label.clone() })
    };
    let mut values = Vec::with_capacity(net.graph.edge_count());
    for &(u, v) in net.graph.edges() {
        let hijackers = [role_of(u)?, role_of(v)?].iter().filter(|&&r| r == Role::Hijacker).count();
        values.push(match hijackers {
            0 => 2.0,
            1 => 1.0,
            _ => 0.5,
        });
    }
    Ok(EdgeWeights::new(&net.graph, values)?)
}

/// Distance `2 / Z` for an edge serving `Z ≥ 1` distinct functions.
pub fn map_multiplicity_weights(graph: &Graph, z: &[u32]) -> Result<EdgeWeights<f64>, IoError> {
    if z.len() != graph.edge_count() {
        return Err(IoError::Graph(crate::graph::GraphError::WeightCountMismatch {
            expected: graph.edge_count(),
            got: z.len(),
        }));
    }
    let mut values = Vec::with_capacity(z.len());
    for (&(u, v), &count) in graph.edges().iter().zip(z) {
        if count < 1 {
            return Err(IoError::InvalidMultiplicity { u, v, value: count as f64 });
        }
        values.push(2.0 / count as f64);
    }
    Ok(EdgeWeights::new(graph, values)?)
}

/// Multiplicities of a network: the third column read as integers when the
/// file is weighted, otherwise how often each edge was listed.
pub fn multiplicities(net: &LabeledNetwork) -> Result<Vec<u32>, IoError> {
    match &net.weights {
        None => Ok(net.multiplicity.clone()),
        Some(w) => net
            .graph
            .edges()
            .iter()
            .zip(w.values())
            .map(|(&(u, v), &z)| {
                if z >= 1.0 && z.fract() == 0.0 && z <= u32::MAX as f64 {
                    Ok(z as u32)
                } else {
                    Err(IoError::InvalidMultiplicity { u, v, value: z })
                }
            })
            .collect(),
    }
}
