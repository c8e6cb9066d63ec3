//! Simple undirected graphs over dense node labels `0..n`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::scalar::{inv_pow, Scalar};

/// Hop distance for a node that cannot be reached from the source.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("edge ({u}, {v}) has non-positive or non-finite distance weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("{got} edge weights supplied for a graph with {expected} edges")]
    WeightCountMismatch { expected: usize, got: usize },
    #[error("no weight supplied for edge ({u}, {v})")]
    MissingWeight { u: usize, v: usize },
    #[error("weight supplied for ({u}, {v}) which is not an edge of the graph")]
    UnknownEdge { u: usize, v: usize },
    #[error("graph has no edges")]
    NoEdges,
    #[error("attenuation exponent cannot be applied in this scalar type")]
    UnsupportedExponent,
}

/// Immutable simple undirected graph.
///
/// Edges are stored once as canonical `(min, max)` pairs in sorted order; the
/// position of an edge in [`Graph::edges`] is its edge id. A CSR adjacency
/// carries `(neighbor, edge id)` for fast traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, usize)>,
}

impl Graph {
    /// Build a graph, collapsing duplicate and reversed pairs.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self::from_canonical(n, canon))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    /// `edges` must already be sorted, deduplicated, in range and loop-free.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![(0, 0); 2 * edges.len()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[fill[u]] = (v, id);
            fill[u] += 1;
            adjacency[fill[v]] = (u, id);
            fill[v] += 1;
        }
        Graph { n, edges, offsets, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(min, max)` edges in edge-id order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs incident to `u`.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adjacency[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// A copy of this graph with one more edge (no-op if already present).
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self, GraphError> {
        Graph::new(self.n, self.edges.iter().copied().chain(std::iter::once((u, v))))
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Hop distances from `source`; [`UNREACHABLE`] marks other components.
    pub fn shortest_path_lengths(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n];
        let mut queue = VecDeque::with_capacity(self.n);
        self.bfs_into(source, &mut dist, &mut queue);
        dist
    }

    /// BFS reusing caller buffers; `dist` must have length `n`.
    pub(crate) fn bfs_into(&self, source: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
        dist.fill(UNREACHABLE);
        queue.clear();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &(v, _) in self.neighbors(u) {
                if dist[v] == UNREACHABLE {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
    }

    /// Dijkstra distances under `weights`; `None` marks unreachable nodes.
    pub fn weighted_shortest_path_lengths<T: Scalar>(
        &self,
        weights: &EdgeWeights<T>,
        source: usize,
    ) -> Result<Vec<Option<T>>, GraphError> {
        weights.check_companion(self)?;
        let mut dist: Vec<Option<T>> = vec![None; self.n];
        let mut settled = vec![false; self.n];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(T::zero());
        heap.push(HeapEntry { dist: T::zero(), node: source });
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if settled[u] {
                continue;
            }
            settled[u] = true;
            for &(v, id) in self.neighbors(u) {
                if settled[v] {
                    continue;
                }
                let cand = d.clone() + weights.values[id].clone();
                let better = match &dist[v] {
                    None => true,
                    Some(cur) => cand < *cur,
                };
                if better {
                    dist[v] = Some(cand.clone());
                    heap.push(HeapEntry { dist: cand, node: v });
                }
            }
        }
        Ok(dist)
    }

    /// Component label per node; labels are assigned in order of smallest member.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Partition of the nodes into connected components, each sorted,
    /// ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let labels = self.component_labels();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut parts = vec![Vec::new(); count];
        for (node, &l) in labels.iter().enumerate() {
            parts[l].push(node);
        }
        parts
    }
}

/// Builds a graph from a list of pairs; see [`Graph::new`].
pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
    Graph::new(n, edges.iter().copied())
}

struct HeapEntry<T> {
    dist: T,
    node: usize,
}

impl<T: PartialOrd> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for HeapEntry<T> {}

impl<T: PartialOrd> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for HeapEntry<T> {
    // min-heap on distance; weights are finite so the order is total
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.partial_cmp(&self.dist).unwrap_or(Ordering::Equal).then_with(|| other.node.cmp(&self.node))
    }
}

/// Strictly positive distance weights aligned with a companion graph's edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights<T> {
    values: Vec<T>,
}

impl<T: Scalar> EdgeWeights<T> {
    /// Weights listed in edge-id order of `graph`.
    pub fn new(graph: &Graph, values: Vec<T>) -> Result<Self, GraphError> {
        if values.len() != graph.edge_count() {
            return Err(GraphError::WeightCountMismatch { expected: graph.edge_count(), got: values.len() });
        }
        for (&(u, v), w) in graph.edges().iter().zip(&values) {
            let as_f = w.as_f64();
            if !(*w > T::zero()) || !as_f.is_finite() {
                return Err(GraphError::NonPositiveWeight { u, v, weight: as_f });
            }
        }
        Ok(EdgeWeights { values })
    }

    pub fn from_fn<F>(graph: &Graph, mut f: F) -> Result<Self, GraphError>
    where
        F: FnMut(usize, usize) -> T,
    {
        Self::new(graph, graph.edges().iter().map(|&(u, v)| f(u, v)).collect())
    }

    /// Weights keyed by node pair; must cover exactly the graph's edge set.
    pub fn from_pairs<I>(graph: &Graph, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = ((usize, usize), T)>,
    {
        let mut slots: Vec<Option<T>> = vec![None; graph.edge_count()];
        for ((u, v), w) in pairs {
            let id = graph.edge_id(u, v).ok_or(GraphError::UnknownEdge { u, v })?;
            slots[id] = Some(w);
        }
        let mut values = Vec::with_capacity(slots.len());
        for (slot, &(u, v)) in slots.into_iter().zip(graph.edges()) {
            values.push(slot.ok_or(GraphError::MissingWeight { u, v })?);
        }
        Self::new(graph, values)
    }

    pub fn uniform(graph: &Graph, value: T) -> Result<Self, GraphError> {
        Self::new(graph, vec![value; graph.edge_count()])
    }

    /// Weight of edge id `id`.
    pub fn by_id(&self, id: usize) -> &T {
        &self.values[id]
    }

    pub fn get(&self, graph: &Graph, u: usize, v: usize) -> Option<&T> {
        graph.edge_id(u, v).map(|id| &self.values[id])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn check_companion(&self, graph: &Graph) -> Result<(), GraphError> {
        if self.values.len() != graph.edge_count() {
            return Err(GraphError::WeightCountMismatch { expected: graph.edge_count(), got: self.values.len() });
        }
        Ok(())
    }
}

/// Harmonic-mean normalizer `|E| / Σ (1/D)^exp`.
pub fn harmonic_mean_weight<T: Scalar>(graph: &Graph, weights: &EdgeWeights<T>, exp: &T) -> Result<T, GraphError> {
    weights.check_companion(graph)?;
    if graph.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let mut total = T::zero();
    for w in &weights.values {
        total = total + inv_pow(w.clone(), exp).ok_or(GraphError::UnsupportedExponent)?;
    }
    Ok(T::from_count(graph.edge_count()) / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn build_path_and_dedup() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        let g = build_graph(3, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn build_rejects_bad_pairs() {
        assert_eq!(build_graph(2, &[(0, 2)]), Err(GraphError::EndpointOutOfRange { u: 0, v: 2, n: 2 }));
        assert_eq!(build_graph(2, &[(1, 1)]), Err(GraphError::SelfLoop { node: 1 }));
    }

    #[test]
    fn hop_distances() {
        let path = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.shortest_path_lengths(0), vec![0, 1, 2]);
        assert_eq!(Graph::empty(2).shortest_path_lengths(0), vec![0, UNREACHABLE]);
        assert_eq!(cycle(5).shortest_path_lengths(0), vec![0, 1, 2, 2, 1]);
    }

    #[test]
    fn weighted_distances() {
        let path = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        let w = EdgeWeights::uniform(&path, 0.5).unwrap();
        let d = path.weighted_shortest_path_lengths(&w, 0).unwrap();
        assert_eq!(d, vec![Some(0.0), Some(0.5), Some(1.0)]);

        let tri = build_graph(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let w = EdgeWeights::from_pairs(&tri, [((0, 1), 3.0), ((0, 2), 1.0), ((1, 2), 1.0)]).unwrap();
        let d = tri.weighted_shortest_path_lengths(&w, 0).unwrap();
        assert_eq!(d[1], Some(2.0));

        let split = Graph::new(3, [(0, 1)]).unwrap();
        let w = EdgeWeights::uniform(&split, 1.0).unwrap();
        assert_eq!(split.weighted_shortest_path_lengths(&w, 0).unwrap()[2], None);
    }

    #[test]
    fn weights_reject_nonpositive_and_partial_cover() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(EdgeWeights::new(&g, vec![1.0, 0.0]), Err(GraphError::NonPositiveWeight { u: 1, v: 2, .. })));
        assert!(matches!(EdgeWeights::new(&g, vec![1.0, f64::INFINITY]), Err(GraphError::NonPositiveWeight { .. })));
        assert_eq!(EdgeWeights::from_pairs(&g, [((0, 1), 1.0)]), Err(GraphError::MissingWeight { u: 1, v: 2 }));
        assert_eq!(EdgeWeights::from_pairs(&g, [((0, 2), 1.0)]), Err(GraphError::UnknownEdge { u: 0, v: 2 }));
        let other = build_graph(3, &[(0, 1)]).unwrap();
        let w = EdgeWeights::uniform(&other, 1.0).unwrap();
        assert!(g.weighted_shortest_path_lengths(&w, 0).is_err());
    }

    #[test]
    fn components() {
        let two = build_graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let parts = two.connected_components();
        assert_eq!(parts, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(Graph::empty(4).connected_components().len(), 4);
        let star = build_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.connected_components().len(), 1);
    }

    #[test]
    fn harmonic_mean() {
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        let ones = EdgeWeights::uniform(&g, ratio(1, 1)).unwrap();
        assert_eq!(harmonic_mean_weight(&g, &ones, &ratio(5, 1)).unwrap(), ratio(1, 1));

        let w = EdgeWeights::new(&g, vec![ratio(1, 1), ratio(2, 1)]).unwrap();
        assert_eq!(harmonic_mean_weight(&g, &w, &ratio(1, 1)).unwrap(), ratio(4, 3));

        let single = build_graph(2, &[(0, 1)]).unwrap();
        let w = EdgeWeights::new(&single, vec![3.0f64]).unwrap();
        assert!((harmonic_mean_weight(&single, &w, &2.0).unwrap() - 9.0).abs() < 1e-12);

        let empty = Graph::empty(3);
        let w: EdgeWeights<BigRational> = EdgeWeights::new(&empty, vec![]).unwrap();
        assert_eq!(harmonic_mean_weight(&empty, &w, &ratio(1, 1)), Err(GraphError::NoEdges));
    }
}
