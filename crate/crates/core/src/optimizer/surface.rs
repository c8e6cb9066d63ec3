use rayon::prelude::*;
use serde::Serialize;

use crate::cascade::{estimate_from_probabilities, EstimatorConfig};
use crate::designs::{exact_cell_metrics, generate, DesignConfig};
use crate::metrics::{distance_histogram, efficiency_from_histogram, resilience_from_extent, MetricsError};
use crate::seed::RunSeed;

use super::OptimizerError;

/// Ensembles whose fitness coefficient of variation reaches this are flagged.
pub const CV_FLAG_THRESHOLD: f64 = 0.2;

const GRAPH_STREAM: u64 = 1;
const CASCADE_STREAM: u64 = 2;

/// One evaluated configuration with cached ensemble statistics.
///
/// Fitness is derived on demand from the cached `(R, W)` means, so sweeping
/// the resilience weight never re-simulates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub config: DesignConfig,
    pub tau: f64,
    pub r_mean: f64,
    pub w_mean: f64,
    /// Monte Carlo half-width of `r_mean` (zero on the closed-form path).
    pub r_ci: f64,
    pub member_r: Vec<f64>,
    pub member_w: Vec<f64>,
    pub mean_degree: f64,
    /// Every member's estimator reached its tolerance before the cap.
    pub tolerance_met: bool,
}

impl SurfacePoint {
    pub fn fitness_at(&self, r: f64) -> f64 {
        r * self.r_mean + (1.0 - r) * self.w_mean
    }

    pub fn fitness_ci(&self, r: f64) -> f64 {
        r * self.r_ci
    }

    /// Coefficient of variation of member fitness at weight `r`.
    pub fn cv_fitness(&self, r: f64) -> f64 {
        let m = self.member_r.len();
        if m < 2 {
            return 0.0;
        }
        let f: Vec<f64> = self.member_r.iter().zip(&self.member_w).map(|(a, b)| r * a + (1.0 - r) * b).collect();
        let mean = f.iter().sum::<f64>() / m as f64;
        let var = f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let sd = var.sqrt();
        if sd == 0.0 {
            0.0
        } else if mean == 0.0 {
            f64::INFINITY
        } else {
            sd / mean.abs()
        }
    }

    /// High ensemble variability, typical near connectivity or percolation
    /// transitions.
    pub fn high_cv(&self, r: f64) -> bool {
        self.cv_fitness(r) >= CV_FLAG_THRESHOLD
    }
}

/// How configurations are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Evaluator {
    pub estimator: EstimatorConfig,
    /// Use the exact per-cell formulas for Stars and Cycles instead of
    /// generating graphs and simulating.
    pub closed_form: bool,
}

impl Evaluator {
    pub fn closed_form() -> Self {
        Evaluator { closed_form: true, ..Default::default() }
    }
}

/// Seed of a configuration, independent of evaluation order.
pub fn configuration_seed(master: RunSeed, config: &DesignConfig) -> RunSeed {
    master.child_of(&config.seed_key())
}

/// Evaluate one configuration at one transmission probability.
pub fn evaluate_configuration(
    config: &DesignConfig,
    tau: f64,
    g_exp: f64,
    seed: RunSeed,
    evaluator: &Evaluator,
) -> Result<SurfacePoint, OptimizerError> {
    Ok(evaluate_at_taus(config, &[tau], g_exp, seed, evaluator)?.remove(0))
}

/// Evaluate one configuration at several transmission probabilities,
/// generating its ensemble and computing efficiency only once.
pub fn evaluate_at_taus(
    config: &DesignConfig,
    taus: &[f64],
    g_exp: f64,
    seed: RunSeed,
    evaluator: &Evaluator,
) -> Result<Vec<SurfacePoint>, OptimizerError> {
    for &tau in taus {
        if !(0.0..=1.0).contains(&tau) {
            return Err(OptimizerError::InvalidTau(tau));
        }
    }
    if !(g_exp >= 0.0) {
        return Err(MetricsError::InvalidAttenuation(g_exp).into());
    }
    let cfg_seed = configuration_seed(seed, config);

    if evaluator.closed_form && config.design.has_closed_form() {
        let k = config.k.expect("cell design has k");
        let degree = generate(config, cfg_seed.child(GRAPH_STREAM)).average_degree();
        return taus
            .iter()
            .map(|&tau| {
                let (r, w) = exact_cell_metrics(config.design, config.n, k, &tau, &g_exp)?;
                Ok(SurfacePoint {
                    config: DesignConfig { ensemble_size: 1, ..*config },
                    tau,
                    r_mean: r,
                    w_mean: w,
                    r_ci: 0.0,
                    member_r: vec![r],
                    member_w: vec![w],
                    mean_degree: degree,
                    tolerance_met: true,
                })
            })
            .collect();
    }

    let m = config.ensemble_size;
    let mut member_w = Vec::with_capacity(m);
    let mut degrees = Vec::with_capacity(m);
    // per tau: (R means, half-widths, all met)
    let mut per_tau: Vec<(Vec<f64>, Vec<f64>, bool)> = vec![(Vec::new(), Vec::new(), true); taus.len()];
    for member in 0..m {
        let graph = generate(config, cfg_seed.child(GRAPH_STREAM).child(member as u64));
        let n = graph.node_count();
        member_w.push(efficiency_from_histogram(n, &distance_histogram(&graph), &g_exp)?);
        degrees.push(graph.average_degree());
        let cascade_seed = cfg_seed.child(CASCADE_STREAM).child(member as u64);
        for (slot, &tau) in per_tau.iter_mut().zip(taus) {
            let est = if n < 2 {
                crate::cascade::MetricEstimate::exact(1.0)
            } else {
                let probs = vec![tau; graph.edge_count()];
                let extent = estimate_from_probabilities(&graph, probs, cascade_seed, &evaluator.estimator)?;
                resilience_from_extent(&extent, n)
            };
            slot.0.push(est.mean);
            slot.1.push(est.half_width_95);
            slot.2 &= est.tolerance_met;
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let w_mean = mean(&member_w);
    let mean_degree = mean(&degrees);
    Ok(per_tau
        .into_iter()
        .zip(taus)
        .map(|((member_r, hw, met), &tau)| SurfacePoint {
            config: *config,
            tau,
            r_mean: mean(&member_r),
            w_mean,
            r_ci: hw.iter().map(|h| h * h).sum::<f64>().sqrt() / m as f64,
            member_r,
            member_w: member_w.clone(),
            mean_degree,
            tolerance_met: met,
        })
        .collect())
}

/// Evaluate many configurations in parallel; the result is in input order
/// and independent of the number of worker threads.
pub fn evaluate_many(
    configs: &[DesignConfig],
    taus: &[f64],
    g_exp: f64,
    seed: RunSeed,
    evaluator: &Evaluator,
) -> Result<Vec<Vec<SurfacePoint>>, OptimizerError> {
    configs.par_iter().map(|c| evaluate_at_taus(c, taus, g_exp, seed, evaluator)).collect()
}
