use std::cmp::Ordering;

use serde::Serialize;

use crate::designs::DesignConfig;

use super::surface::SurfacePoint;
use super::OptimizerError;

/// A retained `(R, W)` trade-off with the configuration that achieves it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParetoPoint {
    pub r: f64,
    pub w: f64,
    pub config: DesignConfig,
}

fn canonical(a: &ParetoPoint, b: &ParetoPoint) -> Ordering {
    b.r.total_cmp(&a.r)
        .then_with(|| b.w.total_cmp(&a.w))
        .then_with(|| a.config.design.cmp(&b.config.design))
        .then_with(|| a.config.k.cmp(&b.config.k))
        .then_with(|| a.config.p.unwrap_or(-1.0).total_cmp(&b.config.p.unwrap_or(-1.0)))
}

/// ε-thinned Pareto frontier of a surface, maximizing both R and W.
///
/// Non-dominated points are visited from highest R down and kept unless an
/// already-kept point lies within `epsilon` in both objectives. Every input
/// point is then ε-dominated by some kept point, kept points are mutually
/// non-dominated, and the result does not depend on input order.
pub fn pareto_frontier(points: &[SurfacePoint], epsilon: f64) -> Result<Vec<ParetoPoint>, OptimizerError> {
    pareto_frontier_of(points.iter().map(|p| ParetoPoint { r: p.r_mean, w: p.w_mean, config: p.config }), epsilon)
}

pub fn pareto_frontier_of<I>(points: I, epsilon: f64) -> Result<Vec<ParetoPoint>, OptimizerError>
where
    I: IntoIterator<Item = ParetoPoint>,
{
    if !(epsilon > 0.0) {
        return Err(OptimizerError::InvalidEpsilon(epsilon));
    }
    let mut sorted: Vec<ParetoPoint> = points.into_iter().collect();
    sorted.sort_by(canonical);
    // sorted by R descending: a point survives iff its W beats every earlier W
    let mut best_w = f64::NEG_INFINITY;
    let mut front = Vec::new();
    for p in sorted {
        if p.w > best_w {
            best_w = p.w;
            front.push(p);
        }
    }
    let mut kept: Vec<ParetoPoint> = Vec::new();
    for p in front {
        let covered = kept.iter().any(|q| (q.r - p.r).abs() <= epsilon && (q.w - p.w).abs() <= epsilon);
        if !covered {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// `a` is within `epsilon` of dominating `b`.
pub fn epsilon_dominates(a: &ParetoPoint, b: &ParetoPoint, epsilon: f64) -> bool {
    a.r + epsilon >= b.r && a.w + epsilon >= b.w
}

/// Strict Pareto dominance.
pub fn dominates(a: &ParetoPoint, b: &ParetoPoint) -> bool {
    a.r >= b.r && a.w >= b.w && (a.r > b.r || a.w > b.w)
}
