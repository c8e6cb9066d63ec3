//! Design and evaluation of cascade-resilient networks.
//!
//! Networks are scored by resilience `R` (one minus the expected share of
//! other nodes a cascade from a random node reaches) and efficiency `W`
//! (distance-attenuated reach), combined as `F = r·R + (1 − r)·W`. The
//! [`designs`] module generates cell-based topologies, [`optimizer`] grid
//! searches their parameters, and [`io`] analyzes user-supplied networks.
//!
//! Deterministic metrics are generic over [`Scalar`]; the aliases below fix
//! the two scalars used in practice.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod designs;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod optimizer;
pub mod scalar;
pub mod seed;

pub use cascade::{
    edge_transmission_prob, estimate_expected_extent, estimate_expected_extent_with, expected_extent_exact,
    simulate_cascade, simulate_cascade_stepwise, CascadeError, CascadeParams, EstimatorConfig, MetricEstimate,
    SimulationMethod,
};
pub use designs::{
    analytic_cycles, analytic_stars, exact_cell_metrics, generate, stars_single_cell_threshold, Design, DesignConfig,
    DesignError, InterCellWiring,
};
pub use graph::{build_graph, harmonic_mean_weight, EdgeWeights, Graph, GraphError, UNREACHABLE};
pub use metrics::{
    efficiency, fitness, resilience, resilience_exact, weighted_efficiency, FitnessParams, MetricsError,
};
pub use scalar::{ratio, Scalar};
pub use seed::RunSeed;

/// Floating-point scalar of the Monte Carlo paths and all reports.
pub type Real = f64;
/// Exact rational scalar for oracles and closed forms.
pub type Exact = num_rational::BigRational;

pub type Weights = EdgeWeights<Real>;
pub type ExactWeights = EdgeWeights<Exact>;
pub type Cascade = CascadeParams<Real>;
pub type ExactCascade = CascadeParams<Exact>;
pub type Fitness = FitnessParams<Real>;
pub type ExactFitness = FitnessParams<Exact>;
