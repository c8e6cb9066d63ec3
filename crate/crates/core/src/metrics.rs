//! Resilience, efficiency and their weighted aggregate.

use std::collections::VecDeque;

use thiserror::Error;

use crate::cascade::{
    estimate_expected_extent_with, expected_extent_exact, CascadeError, CascadeParams, EstimatorConfig, MetricEstimate,
};
use crate::graph::{harmonic_mean_weight, EdgeWeights, Graph, GraphError, UNREACHABLE};
use crate::scalar::{int_pow, inv_pow, Scalar};
use crate::seed::RunSeed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("resilience weight r = {0} outside [0, 1]")]
    InvalidResilienceWeight(f64),
    #[error("attenuation exponent g = {0} must be non-negative")]
    InvalidAttenuation(f64),
    #[error("attenuation exponent cannot be applied in this scalar type")]
    UnsupportedExponent,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
}

/// Weight `r` on resilience and attenuation exponent `g` for efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessParams<T> {
    r: T,
    g_exp: T,
}

impl<T: Scalar> FitnessParams<T> {
    pub fn new(r: T, g_exp: T) -> Result<Self, MetricsError> {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(MetricsError::InvalidResilienceWeight(r.as_f64()));
        }
        if !(g_exp >= T::zero()) {
            return Err(MetricsError::InvalidAttenuation(g_exp.as_f64()));
        }
        Ok(FitnessParams { r, g_exp })
    }

    /// `g = 1`, the attenuation used throughout the design experiments.
    pub fn with_unit_attenuation(r: T) -> Result<Self, MetricsError> {
        Self::new(r, T::one())
    }

    pub fn r(&self) -> &T {
        &self.r
    }

    pub fn g_exp(&self) -> &T {
        &self.g_exp
    }
}

/// Number of ordered pairs `(u, v)`, `u != v`, at each finite hop distance.
/// Index 0 is always zero.
pub fn distance_histogram(graph: &Graph) -> Vec<usize> {
    let n = graph.node_count();
    let mut hist = vec![0usize; 1];
    let mut dist = vec![UNREACHABLE; n];
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        graph.bfs_into(s, &mut dist, &mut queue);
        for &d in &dist {
            if d != UNREACHABLE && d > 0 {
                let d = d as usize;
                if d >= hist.len() {
                    hist.resize(d + 1, 0);
                }
                hist[d] += 1;
            }
        }
    }
    hist
}

/// Efficiency from a precomputed [`distance_histogram`].
pub fn efficiency_from_histogram<T: Scalar>(n: usize, hist: &[usize], g_exp: &T) -> Result<T, MetricsError> {
    if n < 2 {
        return Ok(T::zero());
    }
    let mut total = T::zero();
    for (d, &count) in hist.iter().enumerate().skip(1) {
        if count > 0 {
            let denom = int_pow::<T>(d, g_exp).ok_or(MetricsError::UnsupportedExponent)?;
            total = total + T::from_count(count) / denom;
        }
    }
    Ok(total / T::from_count(n * (n - 1)))
}

/// Distance-attenuated reach: the mean of `1 / d(u, v)^g` over ordered pairs,
/// with unreachable pairs contributing zero. Zero when `n < 2`.
pub fn efficiency<T: Scalar>(graph: &Graph, g_exp: &T) -> Result<T, MetricsError> {
    efficiency_from_histogram(graph.node_count(), &distance_histogram(graph), g_exp)
}

/// Weighted efficiency plus a flag for values above one, which only occur
/// when some edge is longer than an alternative path between its endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEfficiency<T> {
    pub value: T,
    pub above_unity: bool,
}

/// Harmonic-mean normalized efficiency over Dijkstra distances.
pub fn weighted_efficiency<T: Scalar>(
    graph: &Graph,
    weights: &EdgeWeights<T>,
    g_exp: &T,
) -> Result<WeightedEfficiency<T>, MetricsError> {
    let n = graph.node_count();
    if n < 2 || graph.edge_count() == 0 {
        weights.check_companion(graph)?;
        return Ok(WeightedEfficiency { value: T::zero(), above_unity: false });
    }
    let h = harmonic_mean_weight(graph, weights, g_exp).map_err(|e| match e {
        GraphError::UnsupportedExponent => MetricsError::UnsupportedExponent,
        other => other.into(),
    })?;
    let mut total = T::zero();
    for s in 0..n {
        let dist = graph.weighted_shortest_path_lengths(weights, s)?;
        for (v, d) in dist.into_iter().enumerate() {
            if v == s {
                continue;
            }
            if let Some(d) = d {
                total = total + inv_pow(d, g_exp).ok_or(MetricsError::UnsupportedExponent)?;
            }
        }
    }
    let value = h * total / T::from_count(n * (n - 1));
    let above_unity = value > T::one();
    Ok(WeightedEfficiency { value, above_unity })
}

/// Monte Carlo resilience `1 − E[extent] / (n − 1)` with its propagated
/// confidence interval. Exactly one when `n < 2`.
pub fn resilience(
    graph: &Graph,
    params: &CascadeParams<f64>,
    seed: RunSeed,
    config: &EstimatorConfig,
) -> Result<MetricEstimate, MetricsError> {
    let n = graph.node_count();
    if n < 2 {
        return Ok(MetricEstimate::exact(1.0));
    }
    let extent = estimate_expected_extent_with(graph, params, seed, config)?;
    Ok(resilience_from_extent(&extent, n))
}

pub fn resilience_from_extent(extent: &MetricEstimate, n: usize) -> MetricEstimate {
    if n < 2 {
        return MetricEstimate::exact(1.0);
    }
    extent.affine(1.0, -1.0 / (n - 1) as f64)
}

/// Resilience from the exact enumeration oracle (small graphs only).
pub fn resilience_exact<T: Scalar>(graph: &Graph, params: &CascadeParams<T>) -> Result<T, MetricsError> {
    let n = graph.node_count();
    if n < 2 {
        return Ok(T::one());
    }
    let extent = expected_extent_exact(graph, params)?;
    Ok(T::one() - extent / T::from_count(n - 1))
}

/// `r·R + (1 − r)·W`.
pub fn fitness<T: Scalar>(resilience: T, efficiency: T, r: T) -> T {
    r.clone() * resilience + (T::one() - r) * efficiency
}
