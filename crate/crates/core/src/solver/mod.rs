//! Radii of the Model 1 / Model 2 segment systems on finite marked point
//! sets, by three independent methods, plus the defining-property checks.

mod candidates;
mod certify;
mod chain;
mod descending;
mod fixed_point;
mod operators;
mod oracle;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pointprocess::MarkedPointSet;
use crate::scalar::{Scalar, Tolerances};

pub use candidates::{Candidate, CandidateIndex};
pub use chain::{solve_chain, solve_chain_with, ChainTrace, Terminal};
pub use descending::{find_descending_chain, ChainType};
pub use fixed_point::{solve_fixed_point, solve_fixed_point_with};
pub use operators::{apply_operator, apply_t1, apply_t2};
pub use oracle::{solve_greedy_oracle, solve_greedy_oracle_with};
pub use verify::{verify_gmhs, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    /// Stops when one of its own growing ends hits another segment.
    Model1,
    /// Stops when its end hits, or it is hit by the end of, another segment.
    Model2,
}

impl Model {
    pub fn number(self) -> u8 {
        match self {
            Model::Model1 => 1,
            Model::Model2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Model::Model1),
            2 => Some(Model::Model2),
            _ => None,
        }
    }

    /// Whether `f(j)` admits a stop at the crossing reached by `j` after `d_ji`.
    /// Strict for Model 1, non-strict for Model 2.
    #[inline]
    pub(crate) fn admits<T: Scalar>(self, f_j: T, d_ji: T) -> bool {
        match self {
            Model::Model1 => f_j > d_ji,
            Model::Model2 => f_j >= d_ji,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model {}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    Chain,
    GreedyOracle,
}

/// Radius per germ index, each in `[0, ∞]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiAssignment<T>(Vec<T>);

impl<T: Scalar> RadiiAssignment<T> {
    /// Fails on a NaN or negative entry, reporting its index.
    pub fn new(radii: Vec<T>) -> Result<Self, usize> {
        match radii.iter().position(|r| !(*r >= T::zero())) {
            Some(bad) => Err(bad),
            None => Ok(RadiiAssignment(radii)),
        }
    }

    pub fn constant(n: usize, value: T) -> Self {
        RadiiAssignment(vec![value; n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.0[i]
    }

    pub fn finite_count(&self) -> usize {
        self.0.iter().filter(|r| r.is_finite()).count()
    }

    /// Bitwise equality, so `∞ = ∞` and signed zeros are distinguished.
    pub fn identical(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a == b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub set: MarkedPointSet<T>,
    pub model: Model,
    pub radii: RadiiAssignment<T>,
    pub method: Method,
    /// Operator applications, chain steps or fired events, by method.
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    pub tolerances: Tolerances<T>,
    /// Reject solutions whose decisive comparisons are not separated by `tolerances.tie`.
    pub certify: bool,
    /// Run [`verify_gmhs`] on the result.
    pub verify: bool,
    /// Chain solver only: compare against the fixed point.
    pub cross_check: bool,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tolerances: T::default_tolerances(),
            certify: true,
            verify: true,
            cross_check: true,
        }
    }
}

/// An indistinguishable pair of distances that decided a stop.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisiveTie {
    pub index: usize,
    pub other: usize,
    pub left: f64,
    pub right: f64,
}

impl fmt::Display for DecisiveTie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}): {} vs {}", self.index, self.other, self.left, self.right)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("genericity violated, {} unresolvable comparison(s), first {}", .0.len(), .0[0])]
    ConditionDViolation(Vec<DecisiveTie>),
    #[error("no fixed point after {0} iterations")]
    NonConvergence(usize),
    #[error("iterate {iteration} breaks the monotone sandwich at index {index}")]
    MonotonicityViolation { iteration: usize, index: usize },
    #[error("chain algorithm diverged: {0}")]
    AlgorithmDivergence(String),
    #[error("solution failed verification: {0}")]
    VerificationFailed(String),
}

impl SolverError {
    /// True for errors that indicate a bug rather than a degenerate input.
    pub fn is_internal(&self) -> bool {
        !matches!(self, SolverError::ConditionDViolation(_))
    }
}

pub(crate) fn finish<T: Scalar>(
    set: &MarkedPointSet<T>,
    model: Model,
    radii: Vec<T>,
    method: Method,
    iterations: usize,
    index: &mut CandidateIndex<'_, T>,
    opts: &SolverOptions<T>,
) -> Result<Solution<T>, SolverError> {
    if opts.certify {
        certify::certify_separation(index, &radii, opts.tolerances.tie)?;
    }
    let radii =
        RadiiAssignment::new(radii).map_err(|i| SolverError::AlgorithmDivergence(format!("invalid radius at {i}")))?;
    if opts.verify {
        let report = verify::verify_with_index(set, &radii, model, opts.tolerances.contact, index);
        if !report.passes {
            if opts.certify {
                if let Some(ties) = collinear_collisions(set, &report, opts.tolerances.parallel) {
                    return Err(SolverError::ConditionDViolation(ties));
                }
            }
            return Err(SolverError::VerificationFailed(report.summary()));
        }
    }
    Ok(Solution {
        set: set.clone(),
        model,
        radii,
        method,
        iterations,
    })
}

/// Collinear germs meeting tip to tip are a genericity failure, not a solver
/// bug: the growth distances of such a pair do not describe their collision.
/// Returns the ties when every hard-core violation is of that kind.
fn collinear_collisions<T: Scalar>(
    set: &MarkedPointSet<T>,
    report: &verify::VerificationReport,
    parallel: T,
) -> Option<Vec<DecisiveTie>> {
    if report.hard_core_violations.is_empty()
        || !report.growth_violations.is_empty()
        || !report.fixed_point_violations.is_empty()
    {
        return None;
    }
    let pts = set.points();
    report
        .hard_core_violations
        .iter()
        .map(|&(i, j)| {
            let (kind, d_ij, d_ji) = crate::geometry::growth_distances(&pts[i], &pts[j], parallel);
            (kind == crate::geometry::PairKind::CollinearParallel).then(|| DecisiveTie {
                index: i,
                other: j,
                left: d_ij.to_f64_lossy(),
                right: d_ji.to_f64_lossy(),
            })
        })
        .collect()
}
