//! Command implementations behind the `telegraph` binary.
//!
//! Every command writes delimited text through a caller-supplied writer so
//! the same code serves the binary and the tests.

pub mod commands;
pub mod config;

use telegraph_core::basis::BasisError;
use telegraph_core::linalg::LinalgError;
use telegraph_core::metrics::MetricsError;
use telegraph_core::problem::ProblemError;
use telegraph_core::solver::SolverError;
use thiserror::Error;

pub use commands::{
    cmd_bench, cmd_solve, cmd_stability, BenchRow, OutputFormat, ProblemSource, RunConfig,
    StabilityConfig, StabilityRow, Sweep, SweepParam,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<BasisError> for CliError {
    fn from(e: BasisError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::MissingExact(_) => CliError::Config(e.to_string()),
            MetricsError::Basis(b) => b.into(),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Linalg(l) => l.into(),
            SolverError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            SolverError::Basis(b) => b.into(),
            SolverError::Params(_)
            | SolverError::Dimension { .. }
            | SolverError::OutputTime { .. }
            | SolverError::Domain { .. } => CliError::Config(e.to_string()),
        }
    }
}
