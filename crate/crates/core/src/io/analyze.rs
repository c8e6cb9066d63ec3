use serde::Serialize;

use crate::cascade::{CascadeParams, EstimatorConfig, MetricEstimate};
use crate::graph::{EdgeWeights, Graph};
use crate::metrics::{efficiency, resilience, weighted_efficiency, FitnessParams, MetricsError};
use crate::seed::RunSeed;

use super::IoError;

const BINARY_STREAM: u64 = 1;
const WEIGHTED_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricRow {
    pub r: f64,
    pub r_ci: f64,
    pub w: f64,
    pub fitness: f64,
    pub fitness_ci: f64,
}

impl MetricRow {
    fn new(r_weight: f64, rest: MetricEstimate, w: f64) -> Self {
        MetricRow {
            r: rest.mean,
            r_ci: rest.half_width_95,
            w,
            fitness: r_weight * rest.mean + (1.0 - r_weight) * w,
            fitness_ci: r_weight * rest.half_width_95,
        }
    }

    /// The same metrics combined at resilience weight `r_weight`.
    pub fn at_weight(&self, r_weight: f64) -> Self {
        MetricRow { fitness: r_weight * self.r + (1.0 - r_weight) * self.w, fitness_ci: r_weight * self.r_ci, ..*self }
    }
}

/// Metrics of one network at one τ, binary and (if weights exist) weighted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisRow {
    pub tau: f64,
    pub binary: MetricRow,
    pub weighted: Option<MetricRow>,
    pub weighted_w_above_unity: bool,
}

impl AnalysisRow {
    /// `|F_binary − F_weighted|`.
    pub fn fitness_gap(&self) -> Option<f64> {
        self.weighted.map(|w| (self.binary.fitness - w.fitness).abs())
    }

    /// `|W_binary − W_weighted|`.
    pub fn efficiency_gap(&self) -> Option<f64> {
        self.weighted.map(|w| (self.binary.w - w.w).abs())
    }

    pub fn at_weight(&self, r_weight: f64) -> Self {
        AnalysisRow {
            binary: self.binary.at_weight(r_weight),
            weighted: self.weighted.map(|w| w.at_weight(r_weight)),
            ..*self
        }
    }
}

/// Resilience, efficiency and fitness of an empirical network over a τ grid.
pub fn analyze_network(
    graph: &Graph,
    weights: Option<&EdgeWeights<f64>>,
    taus: &[f64],
    r: f64,
    g_exp: f64,
    seed: RunSeed,
    estimator: &EstimatorConfig,
) -> Result<Vec<AnalysisRow>, IoError> {
    let params = FitnessParams::new(r, g_exp)?;
    let w_binary = efficiency(graph, params.g_exp())?;
    let w_weighted = weights.map(|w| weighted_efficiency(graph, w, params.g_exp())).transpose()?;
    let row = |rest: MetricEstimate, w: f64| MetricRow::new(r, rest, w);
    let mut rows = Vec::with_capacity(taus.len());
    for (i, &tau) in taus.iter().enumerate() {
        let binary_params = CascadeParams::new(tau).map_err(MetricsError::from)?;
        let rb = resilience(graph, &binary_params, seed.child(BINARY_STREAM).child(i as u64), estimator)?;
        let weighted = match (weights, &w_weighted) {
            (Some(w), Some(we)) => {
                let p = CascadeParams::weighted(tau, w.clone()).map_err(MetricsError::from)?;
                let rw = resilience(graph, &p, seed.child(WEIGHTED_STREAM).child(i as u64), estimator)?;
                Some(row(rw, we.value))
            }
            _ => None,
        };
        rows.push(AnalysisRow {
            tau,
            binary: row(rb, w_binary),
            weighted,
            weighted_w_above_unity: w_weighted.as_ref().is_some_and(|we| we.above_unity),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_network() {
        let rows = analyze_network(
            &Graph::empty(5),
            None,
            &[0.0, 0.5, 1.0],
            0.51,
            1.0,
            RunSeed::new(1),
            &EstimatorConfig::default(),
        )
        .unwrap();
        for row in rows {
            assert_eq!(row.binary.r, 1.0);
            assert_eq!(row.binary.w, 0.0);
            assert!((row.binary.fitness - 0.51).abs() < 1e-15);
            assert!(row.weighted.is_none());
        }
    }

    #[test]
    fn k3_at_half() {
        let k3 = Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let rows =
            analyze_network(&k3, None, &[0.0, 0.5], 0.5, 1.0, RunSeed::new(2), &EstimatorConfig::default()).unwrap();
        assert_eq!(rows[0].binary.r, 1.0);
        let row = rows[1].binary;
        assert_eq!(row.w, 1.0);
        // exact F = 0.5·0.375 + 0.5·1 = 0.6875; the stopping rule bounds the
        // extent half-width by 0.5 nodes, i.e. 0.125 in fitness
        assert!(row.fitness_ci <= 0.125);
        assert!((row.fitness - 0.6875).abs() <= 0.125, "{row:?}");
    }

    #[test]
    fn unit_weights_match_binary() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let w = EdgeWeights::uniform(&g, 1.0).unwrap();
        let rows =
            analyze_network(&g, Some(&w), &[0.3], 0.5, 1.0, RunSeed::new(3), &EstimatorConfig::default()).unwrap();
        assert_eq!(rows[0].efficiency_gap(), Some(0.0));
        assert!(rows[0].fitness_gap().unwrap() < 0.05);
    }

    #[test]
    fn reweighting_matches_direct_run() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let cfg = EstimatorConfig::default();
        let a = analyze_network(&g, None, &[0.4], 0.25, 1.0, RunSeed::new(8), &cfg).unwrap();
        let b = analyze_network(&g, None, &[0.4], 0.75, 1.0, RunSeed::new(8), &cfg).unwrap();
        let moved = a[0].at_weight(0.75);
        assert!((moved.binary.fitness - b[0].binary.fitness).abs() < 1e-15);
        assert!((moved.binary.fitness_ci - b[0].binary.fitness_ci).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_weight() {
        assert!(analyze_network(
            &Graph::empty(2),
            None,
            &[0.1],
            1.5,
            1.0,
            RunSeed::new(0),
            &EstimatorConfig::default()
        )
        .is_err());
        assert!(analyze_network(
            &Graph::empty(2),
            None,
            &[1.1],
            0.5,
            1.0,
            RunSeed::new(0),
            &EstimatorConfig::default()
        )
        .is_err());
    }
}
