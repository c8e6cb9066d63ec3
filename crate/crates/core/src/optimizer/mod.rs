//! Grid search over design configurations, Pareto frontiers and
//! sensitivity of the optimum.

mod pareto;
mod search;
mod sensitivity;
mod surface;

use thiserror::Error;

use crate::cascade::CascadeError;
use crate::designs::DesignError;
use crate::metrics::MetricsError;

pub use pareto::{dominates, epsilon_dominates, pareto_frontier, pareto_frontier_of, ParetoPoint};
pub use search::{
    evaluate_surfaces, fitness_curve, fitness_curves, grid_search, refine_surface, CurvePoint, FitnessCurve,
    SearchGrid, SearchResult, SearchSettings, Surface, EXTRA_P_POINTS,
};
pub use sensitivity::{sample_std, sensitivity, SensitivityReport};
pub use surface::{
    configuration_seed, evaluate_at_taus, evaluate_configuration, evaluate_many, Evaluator, SurfacePoint,
    CV_FLAG_THRESHOLD,
};

/// Default ε for frontier thinning.
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Near-optimal set: fitness at least this fraction of the best.
pub const NEAR_OPTIMAL_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("transmission probability {0} outside [0, 1]")]
    InvalidTau(f64),
    #[error("resilience weight {0} outside [0, 1]")]
    InvalidWeight(f64),
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("surface has no points")]
    EmptySurface,
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
}
