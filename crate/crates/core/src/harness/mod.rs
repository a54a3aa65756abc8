//! Experiment configuration, plot files, subplots, batch runs and outputs.

pub mod config;
pub mod experiment;
pub mod figures;
pub mod io;
pub mod results_io;
pub mod subplots;

use std::path::Path;

use thiserror::Error;

use crate::detect::DetectError;
use crate::estimate::EstimateError;
use crate::geom::GeomError;
use crate::simulate::SimulateError;
use crate::sstats::SstatsError;

pub use config::{DatasetConfig, DegeneratePolicy, Estimator, ExperimentConfig};
pub use experiment::{
    aggregate, coverage_table, error_table, estimate_plot, run_experiment, simulate_plots, CoverageRow, DatasetSummary,
    ErrorTableRow, EstimateRow, EstimationSettings, ExperimentResults, PlotEstimate, PlotStatus, PlotSummary,
};
pub use figures::emit_figures;
pub use io::{ingest_plots, read_plots, write_plots, write_plots_to, PlotGroup, PlotRecord};
pub use subplots::{extract_subplots, subplot_centres, Subplot};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error(transparent)]
    Sstats(#[from] SstatsError),
}

impl HarnessError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    /// Degenerate probabilities or weights, handled by the configured policy.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            HarnessError::Detect(DetectError::DegenerateProbability { .. } | DetectError::DegenerateWeight { .. })
        )
    }
}

impl From<GeomError> for HarnessError {
    fn from(e: GeomError) -> Self {
        HarnessError::Detect(DetectError::from(e))
    }
}
