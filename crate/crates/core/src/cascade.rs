//! SIR cascades: simulation, the exact bond-percolation oracle, and the
//! sequential Monte Carlo estimator of expected cascade extent.
//!
//! A node that fails transmits to each susceptible neighbor exactly once, so
//! the set of nodes a cascade eventually reaches is distributed as the
//! seed's cluster under independent bond percolation with per-edge
//! probabilities. The default simulator samples that cluster directly,
//! flipping each edge at most once; [`simulate_cascade_stepwise`] runs the
//! synchronous S/I/R dynamics and is kept for cross-checking.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{EdgeWeights, Graph, GraphError};
use crate::scalar::Scalar;
use crate::seed::RunSeed;

/// Largest edge count accepted by [`expected_extent_exact`].
pub const ENUMERATION_EDGE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CascadeError {
    #[error("transmission probability {0} outside [0, 1]")]
    InvalidTau(f64),
    #[error("edge distance {0} must be positive")]
    NonPositiveDistance(f64),
    #[error("exact enumeration needs at most {cap} edges, graph has {edges}; use the Monte Carlo estimator")]
    TooManyEdges { edges: usize, cap: usize },
    #[error("seed node {node} outside 0..{n}")]
    SeedOutOfRange { node: usize, n: usize },
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Transmission probability `min(tau / d, 1)` across an edge of distance `d`.
pub fn edge_transmission_prob<T: Scalar>(tau: T, distance: T) -> Result<T, CascadeError> {
    if !(distance > T::zero()) {
        return Err(CascadeError::NonPositiveDistance(distance.as_f64()));
    }
    Ok((tau / distance).min_of(T::one()))
}

/// Per-step transmission probability plus optional distance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeParams<T> {
    tau: T,
    weights: Option<EdgeWeights<T>>,
}

impl<T: Scalar> CascadeParams<T> {
    pub fn new(tau: T) -> Result<Self, CascadeError> {
        if !(tau >= T::zero() && tau <= T::one()) {
            return Err(CascadeError::InvalidTau(tau.as_f64()));
        }
        Ok(CascadeParams { tau, weights: None })
    }

    /// Transmission through edge `(u, v)` becomes `min(tau / D(u, v), 1)`.
    pub fn weighted(tau: T, weights: EdgeWeights<T>) -> Result<Self, CascadeError> {
        let mut p = Self::new(tau)?;
        p.weights = Some(weights);
        Ok(p)
    }

    pub fn tau(&self) -> &T {
        &self.tau
    }

    pub fn weights(&self) -> Option<&EdgeWeights<T>> {
        self.weights.as_ref()
    }

    /// Transmission probability of every edge of `graph`, by edge id.
    pub fn edge_probabilities(&self, graph: &Graph) -> Result<Vec<T>, CascadeError> {
        match &self.weights {
            None => Ok(vec![self.tau.clone(); graph.edge_count()]),
            Some(w) => {
                w.check_companion(graph)?;
                w.values().iter().map(|d| edge_transmission_prob(self.tau.clone(), d.clone())).collect()
            }
        }
    }
}

/// Reusable cluster sampler for one graph and transmission table.
pub struct Percolator<'g> {
    graph: &'g Graph,
    probs: Vec<f64>,
    /// `(p, ln(1 − p))` when every edge shares a probability `p` low enough
    /// for geometric skipping to pay off.
    skip: Option<(f64, f64)>,
    stamp: Vec<u32>,
    epoch: u32,
    frontier: Vec<usize>,
}

impl<'g> Percolator<'g> {
    pub fn new(graph: &'g Graph, params: &CascadeParams<f64>) -> Result<Self, CascadeError> {
        Ok(Self::from_probabilities(graph, params.edge_probabilities(graph)?))
    }

    pub(crate) fn from_probabilities(graph: &'g Graph, probs: Vec<f64>) -> Self {
        let skip = match probs.split_first() {
            Some((&p, rest)) if p > 0.0 && p < SKIP_BELOW && rest.iter().all(|&q| q == p) => Some((p, (-p).ln_1p())),
            _ => None,
        };
        Percolator { graph, probs, skip, stamp: vec![0; graph.node_count()], epoch: 0, frontier: Vec::new() }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// New failures caused by `seed_node`, sampled as its percolation cluster.
    pub fn extent(&mut self, seed_node: usize, rng: &mut ChaCha8Rng) -> usize {
        let epoch = self.next_epoch();
        self.stamp[seed_node] = epoch;
        self.frontier.clear();
        self.frontier.push(seed_node);
        let mut reached = 0;
        let n = self.graph.node_count();
        while let Some(u) = self.frontier.pop() {
            let nbrs = self.graph.neighbors(u);
            if let Some((p, log_q)) = self.skip {
                // closed edges before the next open one are geometric; each
                // edge still gets an independent state, used at most once
                let unvisited = nbrs.len().min(n - 1 - reached) as f64;
                if (nbrs.len() as f64 * p + 1.0) * SKIP_DRAW_COST < unvisited * EDGE_DRAW_COST {
                    let mut i = closed_run(rng, log_q);
                    while i < nbrs.len() {
                        let v = nbrs[i].0;
                        if self.stamp[v] != epoch {
                            self.stamp[v] = epoch;
                            reached += 1;
                            self.frontier.push(v);
                        }
                        i = i.saturating_add(1).saturating_add(closed_run(rng, log_q));
                    }
                    continue;
                }
            }
            for &(v, id) in nbrs {
                if self.stamp[v] == epoch {
                    continue;
                }
                let p = self.probs[id];
                if p >= 1.0 || (p > 0.0 && rng.gen::<f64>() < p) {
                    self.stamp[v] = epoch;
                    reached += 1;
                    self.frontier.push(v);
                }
            }
        }
        reached
    }

    /// Synchronous S/I/R dynamics: each infected node gets one independent
    /// attempt per susceptible neighbor, then is removed.
    pub fn extent_stepwise(&mut self, seed_node: usize, rng: &mut ChaCha8Rng) -> usize {
        // stamp == epoch means "no longer susceptible"
        let epoch = self.next_epoch();
        self.stamp[seed_node] = epoch;
        let mut infected = vec![seed_node];
        let mut next = Vec::new();
        let mut reached = 0;
        while !infected.is_empty() {
            for &u in &infected {
                for &(v, id) in self.graph.neighbors(u) {
                    if self.stamp[v] == epoch {
                        continue;
                    }
                    let p = self.probs[id];
                    if p >= 1.0 || (p > 0.0 && rng.gen::<f64>() < p) {
                        self.stamp[v] = epoch;
                        next.push(v);
                    }
                }
            }
            reached += next.len();
            std::mem::swap(&mut infected, &mut next);
            next.clear();
        }
        reached
    }
}

/// Uniform edge probabilities below this may use geometric skipping.
const SKIP_BELOW: f64 = 0.25;
/// Relative costs of one skip draw and one per-edge draw.
const SKIP_DRAW_COST: f64 = 3.0;
const EDGE_DRAW_COST: f64 = 1.0;

/// Failures before the first success in Bernoulli trials with `ln(1 − p) = log_q`.
fn closed_run(rng: &mut ChaCha8Rng, log_q: f64) -> usize {
    let u: f64 = 1.0 - rng.gen::<f64>();
    (u.ln() / log_q) as usize
}

/// One cascade from `seed_node`; returns the number of new failures.
pub fn simulate_cascade(
    graph: &Graph,
    params: &CascadeParams<f64>,
    seed_node: usize,
    seed: RunSeed,
) -> Result<usize, CascadeError> {
    check_seed(graph, seed_node)?;
    Ok(Percolator::new(graph, params)?.extent(seed_node, &mut seed.rng()))
}

/// Step-by-step S/I/R version of [`simulate_cascade`].
pub fn simulate_cascade_stepwise(
    graph: &Graph,
    params: &CascadeParams<f64>,
    seed_node: usize,
    seed: RunSeed,
) -> Result<usize, CascadeError> {
    check_seed(graph, seed_node)?;
    Ok(Percolator::new(graph, params)?.extent_stepwise(seed_node, &mut seed.rng()))
}

fn check_seed(graph: &Graph, node: usize) -> Result<(), CascadeError> {
    if node >= graph.node_count() {
        return Err(CascadeError::SeedOutOfRange { node, n: graph.node_count() });
    }
    Ok(())
}

/// Exact expected extent with a uniformly random seed, by enumerating all
/// `2^|E|` open/closed edge patterns.
pub fn expected_extent_exact<T: Scalar>(graph: &Graph, params: &CascadeParams<T>) -> Result<T, CascadeError> {
    let m = graph.edge_count();
    if m > ENUMERATION_EDGE_CAP {
        return Err(CascadeError::TooManyEdges { edges: m, cap: ENUMERATION_EDGE_CAP });
    }
    let n = graph.node_count();
    if n == 0 {
        return Err(CascadeError::EmptyGraph);
    }
    let probs = params.edge_probabilities(graph)?;
    let closed: Vec<T> = probs.iter().map(|p| T::one() - p.clone()).collect();
    let mut parent = vec![0usize; n];
    let mut size = vec![0usize; n];
    let mut total = T::zero();
    for mask in 0u32..(1u32 << m) {
        let mut weight = T::one();
        for e in 0..m {
            let factor = if mask >> e & 1 == 1 { &probs[e] } else { &closed[e] };
            weight = weight * factor.clone();
        }
        if weight.is_zero() {
            continue;
        }
        for v in 0..n {
            parent[v] = v;
            size[v] = 1;
        }
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if mask >> e & 1 == 1 {
                union(&mut parent, &mut size, u, v);
            }
        }
        // Σ over seeds of (cluster size − 1) = Σ over clusters of s(s − 1)
        let pairs: usize = (0..n).filter(|&v| parent[v] == v).map(|r| size[r] * (size[r] - 1)).sum();
        if pairs > 0 {
            total = total + weight * T::from_count(pairs);
        }
    }
    Ok(total / T::from_count(n))
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn union(parent: &mut [usize], size: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra == rb {
        return;
    }
    let (big, small) = if size[ra] >= size[rb] { (ra, rb) } else { (rb, ra) };
    parent[small] = big;
    size[big] += size[small];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimulationMethod {
    #[default]
    Percolation,
    StepwiseSir,
}

/// Sequential stopping rule for the extent estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub min_reps: usize,
    pub max_reps: usize,
    /// Target confidence half-width, in nodes.
    pub tolerance: f64,
    pub z: f64,
    pub method: SimulationMethod,
    /// Replications evaluated per parallel batch after the first `min_reps`.
    pub batch: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            min_reps: 40,
            max_reps: 200_000,
            tolerance: 0.5,
            z: 1.96,
            method: SimulationMethod::Percolation,
            batch: 256,
        }
    }
}

/// Monte Carlo mean with its normal-approximation confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MetricEstimate {
    pub mean: f64,
    pub sample_sd: f64,
    pub reps: usize,
    pub half_width_95: f64,
    pub tolerance_met: bool,
}

impl MetricEstimate {
    /// A value known exactly.
    pub fn exact(value: f64) -> Self {
        MetricEstimate { mean: value, sample_sd: 0.0, reps: 1, half_width_95: 0.0, tolerance_met: true }
    }

    /// `offset + scale * X`.
    pub fn affine(&self, offset: f64, scale: f64) -> Self {
        MetricEstimate {
            mean: offset + scale * self.mean,
            sample_sd: scale.abs() * self.sample_sd,
            reps: self.reps,
            half_width_95: scale.abs() * self.half_width_95,
            tolerance_met: self.tolerance_met,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.half_width_95
    }
}

#[derive(Default)]
struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn sample_sd(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0).sqrt()
        }
    }

    fn half_width(&self, z: f64) -> f64 {
        if self.count == 0 {
            f64::INFINITY
        } else {
            z * self.sample_sd() / (self.count as f64).sqrt()
        }
    }
}

/// Expected new failures from a uniformly random seed, with the default
/// stopping rule (40 replications, then until the 95% half-width is at most
/// half a node, capped at 200 000).
pub fn estimate_expected_extent(
    graph: &Graph,
    params: &CascadeParams<f64>,
    seed: RunSeed,
) -> Result<MetricEstimate, CascadeError> {
    estimate_expected_extent_with(graph, params, seed, &EstimatorConfig::default())
}

pub fn estimate_expected_extent_with(
    graph: &Graph,
    params: &CascadeParams<f64>,
    seed: RunSeed,
    config: &EstimatorConfig,
) -> Result<MetricEstimate, CascadeError> {
    let probs = params.edge_probabilities(graph)?;
    estimate_from_probabilities(graph, probs, seed, config)
}

pub(crate) fn estimate_from_probabilities(
    graph: &Graph,
    probs: Vec<f64>,
    seed: RunSeed,
    config: &EstimatorConfig,
) -> Result<MetricEstimate, CascadeError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(CascadeError::EmptyGraph);
    }
    let min_reps = config.min_reps.max(1);
    let max_reps = config.max_reps.max(min_reps);
    let replicate = |perc: &mut Percolator<'_>, i: usize| -> f64 {
        let mut rng = seed.replication(i as u64).rng();
        let node = rng.gen_range(0..n);
        let x = match config.method {
            SimulationMethod::Percolation => perc.extent(node, &mut rng),
            SimulationMethod::StepwiseSir => perc.extent_stepwise(node, &mut rng),
        };
        x as f64
    };
    let mut acc = Welford::default();
    let mut done = 0usize;
    let mut batch_len = min_reps;
    let met = loop {
        let end = (done + batch_len).min(max_reps);
        let batch: Vec<f64> = (done..end)
            .into_par_iter()
            .map_init(|| Percolator::from_probabilities(graph, probs.clone()), |perc, i| replicate(perc, i))
            .collect();
        let mut stop = None;
        for x in batch {
            acc.push(x);
            if acc.count >= min_reps && acc.half_width(config.z) <= config.tolerance {
                stop = Some(true);
                break;
            }
        }
        done = acc.count;
        if let Some(met) = stop {
            break met;
        }
        if done >= max_reps {
            break false;
        }
        batch_len = config.batch.max(1);
    };
    Ok(MetricEstimate {
        mean: acc.mean,
        sample_sd: acc.sample_sd(),
        reps: acc.count,
        half_width_95: acc.half_width(config.z),
        tolerance_met: met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::scalar::ratio;

    fn k(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn transmission_probability() {
        assert_eq!(edge_transmission_prob(0.5, 2.0).unwrap(), 0.25);
        assert_eq!(edge_transmission_prob(0.5, 0.25).unwrap(), 1.0);
        assert_eq!(edge_transmission_prob(0.37, 1.0).unwrap(), 0.37);
        assert_eq!(edge_transmission_prob(0.5, 0.0), Err(CascadeError::NonPositiveDistance(0.0)));
    }

    #[test]
    fn params_validate_tau() {
        assert!(CascadeParams::new(1.2).is_err());
        assert!(CascadeParams::new(-0.1).is_err());
        assert!(CascadeParams::new(f64::NAN).is_err());
    }

    #[test]
    fn exact_oracle_small_graphs() {
        let half = CascadeParams::new(ratio(1, 2)).unwrap();
        assert_eq!(expected_extent_exact(&k(2), &half).unwrap(), ratio(1, 2));
        assert_eq!(expected_extent_exact(&k(3), &half).unwrap(), ratio(5, 4));
        let zero = CascadeParams::new(ratio(0, 1)).unwrap();
        assert_eq!(expected_extent_exact(&k(4), &zero).unwrap(), ratio(0, 1));
        // 3-node star: leader reaches 2τ, each leaf τ + τ²  → (1 + 2·0.75)/3
        let star = build_graph(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(expected_extent_exact(&star, &half).unwrap(), ratio(5, 6));
    }

    #[test]
    fn exact_oracle_rejects_large_graphs() {
        let g = k(7);
        let p = CascadeParams::new(0.5).unwrap();
        assert_eq!(expected_extent_exact(&g, &p), Err(CascadeError::TooManyEdges { edges: 21, cap: 20 }));
    }

    #[test]
    fn weighted_oracle_uses_capped_probabilities() {
        let g = k(2);
        let w = EdgeWeights::uniform(&g, ratio(1, 4)).unwrap();
        let p = CascadeParams::weighted(ratio(1, 2), w).unwrap();
        assert_eq!(expected_extent_exact(&g, &p).unwrap(), ratio(1, 1));
        let w = EdgeWeights::uniform(&g, ratio(2, 1)).unwrap();
        let p = CascadeParams::weighted(ratio(1, 2), w).unwrap();
        assert_eq!(expected_extent_exact(&g, &p).unwrap(), ratio(1, 4));
    }

    #[test]
    fn simulation_extremes() {
        let g = k(5);
        let zero = CascadeParams::new(0.0).unwrap();
        let one = CascadeParams::new(1.0).unwrap();
        for i in 0..20 {
            let s = RunSeed::new(1).replication(i);
            assert_eq!(simulate_cascade(&g, &zero, (i % 5) as usize, s).unwrap(), 0);
            assert_eq!(simulate_cascade(&g, &one, (i % 5) as usize, s).unwrap(), 4);
            assert_eq!(simulate_cascade_stepwise(&g, &one, (i % 5) as usize, s).unwrap(), 4);
        }
        assert_eq!(simulate_cascade(&g, &one, 5, RunSeed::new(0)), Err(CascadeError::SeedOutOfRange { node: 5, n: 5 }));
    }

    #[test]
    fn k3_simulation_mean() {
        let g = k(3);
        let p = CascadeParams::new(0.5).unwrap();
        let mut perc = Percolator::new(&g, &p).unwrap();
        let mut rng = RunSeed::new(3).rng();
        let trials = 200_000;
        let mean = (0..trials).map(|i| perc.extent(i % 3, &mut rng)).sum::<usize>() as f64 / trials as f64;
        assert!((mean - 1.25).abs() < 0.01, "{mean}");
        let mean = (0..trials).map(|i| perc.extent_stepwise(i % 3, &mut rng)).sum::<usize>() as f64 / trials as f64;
        assert!((mean - 1.25).abs() < 0.01, "{mean}");
    }

    #[test]
    fn estimator_degenerate_cases_stop_at_40() {
        let g = k(6);
        let e = estimate_expected_extent(&g, &CascadeParams::new(0.0).unwrap(), RunSeed::new(9)).unwrap();
        assert_eq!((e.mean, e.sample_sd, e.reps), (0.0, 0.0, 40));
        assert!(e.tolerance_met);
        let e = estimate_expected_extent(&g, &CascadeParams::new(1.0).unwrap(), RunSeed::new(9)).unwrap();
        assert_eq!((e.mean, e.sample_sd, e.reps), (5.0, 0.0, 40));
    }

    #[test]
    fn estimator_k3() {
        let e = estimate_expected_extent(&k(3), &CascadeParams::new(0.5).unwrap(), RunSeed::new(11)).unwrap();
        assert!(e.reps >= 40);
        assert!(e.half_width_95 <= 0.5);
        assert!((e.half_width_95 - 1.96 * e.sample_sd / (e.reps as f64).sqrt()).abs() < 1e-12);
        assert!((e.mean - 1.25).abs() <= 0.5);
    }

    #[test]
    fn estimator_respects_cap() {
        let g = build_graph(40, &(0..39).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let cfg = EstimatorConfig { max_reps: 50, tolerance: 1e-6, ..EstimatorConfig::default() };
        let e = estimate_expected_extent_with(&g, &CascadeParams::new(0.9).unwrap(), RunSeed::new(2), &cfg).unwrap();
        assert_eq!(e.reps, 50);
        assert!(!e.tolerance_met);
    }

    #[test]
    fn estimator_is_independent_of_batching() {
        let g = build_graph(30, &(0..29).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let p = CascadeParams::new(0.8).unwrap();
        let a =
            estimate_expected_extent_with(&g, &p, RunSeed::new(5), &EstimatorConfig { batch: 1, ..Default::default() })
                .unwrap();
        let b = estimate_expected_extent_with(
            &g,
            &p,
            RunSeed::new(5),
            &EstimatorConfig { batch: 1000, ..Default::default() },
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(a.reps > 40);
    }
}
