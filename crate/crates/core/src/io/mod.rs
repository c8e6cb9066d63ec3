//! Edge-list ingestion, weight rules, empirical-network analysis and
//! report output.

mod analyze;
mod edge_list;
mod report;
mod weights;

use thiserror::Error;

use crate::graph::GraphError;
use crate::metrics::MetricsError;

pub use analyze::{analyze_network, AnalysisRow, MetricRow};
pub use edge_list::{parse_edge_list, parse_edge_list_str, LabeledNetwork, ParseSummary, REFERENCE_SIZES};
pub use report::{
    analysis_table, curve_table, emit_csv, emit_curve_plot, emit_plot, pareto_table, read_csv, recorded_seed,
    sensitivity_table, Table, ANALYSIS_COLUMNS, CURVE_COLUMNS, PARETO_COLUMNS, SENSITIVITY_COLUMNS,
};
pub use weights::{map_hijacker_weights, map_multiplicity_weights, multiplicities, parse_roles, Role};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: weighted and unweighted edge lines are mixed")]
    MixedWeights { line: usize },
    #[error("line {line}: distance weight {value} must be positive")]
    NonPositiveWeight { line: usize, value: f64 },
    #[error("line {line}: self-loop on '{label}'")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: edge repeated with a different weight")]
    ConflictingWeight { line: usize },
    #[error("node '{label}' has no role tag")]
    MissingRole { label: String },
    #[error("edge ({u}, {v}) has multiplicity {value}; expected an integer >= 1")]
    InvalidMultiplicity { u: usize, v: usize, value: f64 },
    #[error("no results to write")]
    EmptyResults,
    #[error("i/o error: {0}")]
    Io(String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("plot error: {0}")]
    Plot(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}
