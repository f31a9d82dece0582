//! Monte Carlo estimation of typical-segment (Palm) quantities from
//! windowed samples, with minus-sampling edge correction.

mod estimate;
mod palm;
mod realization;
mod tail;
mod trend;

use thiserror::Error;

use crate::pointprocess::PointProcessError;
use crate::solver::SolverError;
use crate::structure::StructureError;

pub use estimate::{ratio_estimate, Estimate};
pub use palm::{config_hash, estimate_mu_consistency, run_monte_carlo, McConfig, MuConsistency, PalmEstimates};
pub use realization::{
    derive_seed, mass_transport_check, sample_and_solve, Certification, MassTransport, RealizationTally, SolvedSample,
};
pub use tail::{
    gaussian_tail_diagnostic, pinned_origin_radii, tail_of_r2, GaussianTailFit, PinnedRadii, SurvivalRow, SurvivalTable,
};
pub use trend::{percolation_trend, TrendRow, TrendTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{aborted} of {total} replications aborted")]
    TooManyAborted { aborted: usize, total: usize },
    #[error("tail fit needs at least {needed} non-degenerate radii, got {got}")]
    InsufficientTail { needed: usize, got: usize },
    #[error("trend needs at least 3 window sizes, got {0}")]
    InsufficientSizes(usize),
    #[error(transparent)]
    Sampling(#[from] PointProcessError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("genericity still violated after {0} resampling attempts")]
    ResamplingExhausted(usize),
}

impl StatsError {
    /// True for failures that point at a bug rather than bad input or bad luck.
    pub fn is_internal(&self) -> bool {
        match self {
            StatsError::Solver(e) => e.is_internal(),
            StatsError::Structure(_) => true,
            _ => false,
        }
    }
}
