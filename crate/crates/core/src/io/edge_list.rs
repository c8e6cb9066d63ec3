use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::graph::{EdgeWeights, Graph};

use super::IoError;

/// Published node and edge counts of the empirical networks used for
/// fitness comparisons. User files can be checked against these.
pub const REFERENCE_SIZES: [(&str, usize, usize); 7] = [
    ("11M", 70, 240),
    ("9/11", 62, 152),
    ("CollabNet", 1589, 2742),
    ("E-Mail", 1133, 5452),
    ("FTP", 174, 300),
    ("Gnutella", 6301, 20777),
    ("Internet AS", 26475, 53381),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseSummary {
    pub nodes: usize,
    pub edges: usize,
    pub edge_lines: usize,
    pub duplicates: usize,
    pub weighted: bool,
}

impl ParseSummary {
    /// Name of the reference network with exactly these counts, if any.
    pub fn reference_match(&self) -> Option<&'static str> {
        REFERENCE_SIZES.iter().find(|&&(_, n, m)| n == self.nodes && m == self.edges).map(|&(name, _, _)| name)
    }
}

/// A parsed network with its original node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledNetwork {
    pub graph: Graph,
    pub weights: Option<EdgeWeights<f64>>,
    /// Label of each dense node index, in order of first appearance.
    pub labels: Vec<String>,
    /// How many input lines named each edge, by edge id.
    pub multiplicity: Vec<u32>,
    pub summary: ParseSummary,
}

impl LabeledNetwork {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `(label, label, weight)` per edge, in edge-id order.
    pub fn labeled_edges(&self) -> Vec<(String, String, Option<f64>)> {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .map(|(id, &(u, v))| {
                (self.labels[u].clone(), self.labels[v].clone(), self.weights.as_ref().map(|w| *w.by_id(id)))
            })
            .collect()
    }

    /// Write as an edge list that parses back to the same labeled graph.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v, w) in self.labeled_edges() {
            match w {
                Some(w) => writeln!(out, "{u} {v} {w}")?,
                None => writeln!(out, "{u} {v}")?,
            }
        }
        Ok(())
    }
}

/// Parse a whitespace-separated edge list.
///
/// Each non-blank line outside `#` comments is `u v` or `u v w`, where labels
/// are arbitrary tokens and `w` is a positive distance. Either every edge line
/// carries a weight or none does. Repeated edges are collapsed; a repeated
/// weighted edge must repeat its weight.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<LabeledNetwork, IoError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut seen: HashMap<(usize, usize), (usize, Option<f64>)> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut weighted: Option<bool> = None;
    let mut edge_lines = 0;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| IoError::Io(e.to_string()))?;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(IoError::Syntax {
                line: line_no,
                message: format!("expected 'u v' or 'u v w', found {} fields", tokens.len()),
            });
        }
        let has_weight = tokens.len() == 3;
        match weighted {
            None => weighted = Some(has_weight),
            Some(w) if w != has_weight => return Err(IoError::MixedWeights { line: line_no }),
            _ => {}
        }
        let weight = if has_weight {
            let w: f64 = tokens[2].parse().map_err(|_| IoError::Syntax {
                line: line_no,
                message: format!("weight '{}' is not a number", tokens[2]),
            })?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(IoError::NonPositiveWeight { line: line_no, value: w });
            }
            Some(w)
        } else {
            None
        };
        if tokens[0] == tokens[1] {
            return Err(IoError::SelfLoop { line: line_no, label: tokens[0].to_string() });
        }
        let mut intern = |label: &str| -> usize {
            *index.entry(label.to_string()).or_insert_with(|| {
                labels.push(label.to_string());
                labels.len() - 1
            })
        };
        let (a, b) = (intern(tokens[0]), intern(tokens[1]));
        let key = (a.min(b), a.max(b));
        edge_lines += 1;
        match seen.get_mut(&key) {
            Some((count, prev)) => {
                if *prev != weight {
                    return Err(IoError::ConflictingWeight { line: line_no });
                }
                *count += 1;
            }
            None => {
                seen.insert(key, (1, weight));
                order.push(key);
            }
        }
    }

    let graph = Graph::new(labels.len(), order.iter().copied()).expect("interned endpoints are in range");
    let mut multiplicity = vec![0u32; graph.edge_count()];
    let mut weight_values = vec![0.0; graph.edge_count()];
    for (key, (count, w)) in &seen {
        let id = graph.edge_id(key.0, key.1).expect("edge present");
        multiplicity[id] = *count as u32;
        weight_values[id] = w.unwrap_or(1.0);
    }
    let is_weighted = weighted.unwrap_or(false);
    let weights = if is_weighted {
        Some(EdgeWeights::new(&graph, weight_values).expect("weights validated per line"))
    } else {
        None
    };
    let summary = ParseSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        edge_lines,
        duplicates: edge_lines - graph.edge_count(),
        weighted: is_weighted,
    };
    Ok(LabeledNetwork { graph, weights, labels, multiplicity, summary })
}

pub fn parse_edge_list_str(text: &str) -> Result<LabeledNetwork, IoError> {
    parse_edge_list(text.as_bytes())
}
